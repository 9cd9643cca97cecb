#pragma once

#include <string>
#include <vector>

namespace offsetsim {

enum class DecoyArea {
    AreaIDominated,     // price >= target and offset <= target, strictly worse somewhere
    AreaIINonDominated  // slightly cheaper than the target, strictly worse offset
};

// One point of the decoy parameter grid. `mu` is the price adjustment applied
// to the target/competitor gap; `offset_fraction` is the share of the target's
// (full) offset the decoy provides.
struct DecoyCell {
    double mu = 0.0;
    double offset_fraction = 1.0;
    int index = -1;  // position in the stable grid order, -1 if ad hoc

    std::string id() const;  // e.g. "mu+0.30_off0.50"

    bool operator==(const DecoyCell&) const = default;
};

inline constexpr double kDefaultAreaILadder[6] = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};

// The 45-cell grid: 35 area-I cells (mu in {0..0.5} ascending, ladder offsets
// descending, the degenerate (0, 1.0) cell removed) followed by 10 area-II
// cells (mu -0.1 then -0.2, offsets 0.7 down to 0.3).
// The ladder must hold 6 strictly decreasing values in (0, 1].
std::vector<DecoyCell> enumerate_cells(const std::vector<double>& area1_offset_ladder);
std::vector<DecoyCell> enumerate_cells();  // default ladder

// decoy price = target + mu * (target - competitor). Requires
// target > competitor > 0; the decoy geometry is undefined otherwise.
double decoy_price(double target_price, double competitor_price, double mu);

// decoy offset = target_offset * offset_fraction. Requires target_offset > 0.
double decoy_offset(double target_offset, const DecoyCell& cell);

// Area classification with membership validation: rejects the degenerate
// (mu=0, offset=1) point and mu values outside the grid.
DecoyArea classify_cell(const DecoyCell& cell);

const char* area_name(DecoyArea a);  // "area_1" / "area_2"

// cell id, mu, offset_fraction, area.
void write_grid_csv(const std::string& path, const std::vector<DecoyCell>& cells);

}  // namespace offsetsim
