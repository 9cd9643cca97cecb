#include "offsetsim/decoy_grid.hpp"

#include <cmath>
#include <cstdio>

#include "offsetsim/csv.hpp"
#include "offsetsim/errors.hpp"
#include "offsetsim/format.hpp"

namespace offsetsim {

namespace {

constexpr double kEps = 1e-9;

bool near(double a, double b) { return std::fabs(a - b) < kEps; }

}  // namespace

std::string DecoyCell::id() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "mu%+.2f_off%.2f", mu, offset_fraction);
    return buf;
}

std::vector<DecoyCell> enumerate_cells(const std::vector<double>& ladder) {
    if (ladder.size() != 6)
        throw ConfigError("area-I offset ladder must hold exactly 6 values, got " +
                          std::to_string(ladder.size()));
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0 && ladder[i] <= 1.0))
            throw ConfigError("area-I offset ladder values must lie in (0, 1]");
        if (i > 0 && !(ladder[i] < ladder[i - 1]))
            throw ConfigError("area-I offset ladder must be strictly decreasing");
    }

    std::vector<DecoyCell> cells;
    cells.reserve(45);
    for (int m = 0; m <= 5; ++m) {
        const double mu = m / 10.0;
        for (double off : ladder) {
            if (m == 0 && near(off, 1.0)) continue;  // identical to the target
            cells.push_back({mu, off, static_cast<int>(cells.size())});
        }
    }
    for (double mu : {-0.1, -0.2})
        for (double off : {0.7, 0.6, 0.5, 0.4, 0.3})
            cells.push_back({mu, off, static_cast<int>(cells.size())});
    return cells;
}

std::vector<DecoyCell> enumerate_cells() {
    return enumerate_cells(std::vector<double>(std::begin(kDefaultAreaILadder),
                                               std::end(kDefaultAreaILadder)));
}

double decoy_price(double target_price, double competitor_price, double mu) {
    if (!(target_price > competitor_price) || !(competitor_price > 0.0))
        throw DataError("decoy price undefined: need target > competitor > 0");
    return target_price + mu * (target_price - competitor_price);
}

double decoy_offset(double target_offset, const DecoyCell& cell) {
    if (!(target_offset > 0.0)) throw DataError("decoy offset undefined: target offset must be > 0");
    return target_offset * cell.offset_fraction;
}

DecoyArea classify_cell(const DecoyCell& cell) {
    if (cell.mu < -kEps) {
        bool mu_ok = near(cell.mu, -0.1) || near(cell.mu, -0.2);
        if (!mu_ok) throw DataError("cell not in grid: " + cell.id());
        if (!(cell.offset_fraction > 0.0 && cell.offset_fraction < 1.0))
            throw DataError("cell not in grid: " + cell.id());
        return DecoyArea::AreaIINonDominated;
    }
    bool mu_ok = false;
    for (int m = 0; m <= 5; ++m) mu_ok = mu_ok || near(cell.mu, m / 10.0);
    if (!mu_ok) throw DataError("cell not in grid: " + cell.id());
    if (!(cell.offset_fraction > 0.0 && cell.offset_fraction <= 1.0 + kEps))
        throw DataError("cell not in grid: " + cell.id());
    // weak dominance by the target on both axes, strict on at least one
    if (near(cell.mu, 0.0) && near(cell.offset_fraction, 1.0))
        throw DataError("cell not in grid: " + cell.id());
    return DecoyArea::AreaIDominated;
}

const char* area_name(DecoyArea a) {
    return a == DecoyArea::AreaIDominated ? "area_1" : "area_2";
}

void write_grid_csv(const std::string& path, const std::vector<DecoyCell>& cells) {
    csv::Writer w(path);
    w.row({"cell_id", "mu", "offset_fraction", "area"});
    for (const DecoyCell& c : cells)
        w.row({c.id(), format_double(c.mu), format_double(c.offset_fraction),
               area_name(classify_cell(c))});
}

}  // namespace offsetsim
