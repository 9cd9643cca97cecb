#include "offsetsim/impact.hpp"

#include "offsetsim/csv.hpp"
#include "offsetsim/errors.hpp"
#include "offsetsim/format.hpp"

namespace offsetsim {

namespace {

void validate(const CountryImpactInputs& in) {
    if (in.flights_per_person < 0.0 || in.population < 0.0 || in.mean_distance_km < 0.0 ||
        in.emission_factor_g_km < 0.0)
        throw ConfigError("impact inputs must be non-negative");
    if (in.sceptic_share < 0.0 || in.sceptic_share > 1.0)
        throw ConfigError("sceptic share must lie in [0,1]");
    if (in.uplift < 0.0 || in.uplift > 1.0) throw ConfigError("uplift must lie in [0,1]");
}

}  // namespace

double country_emissions_mt(const CountryImpactInputs& in) {
    validate(in);
    const double grams =
        in.flights_per_person * in.population * in.mean_distance_km * in.emission_factor_g_km;
    return grams / 1e12;  // g -> Mt
}

double sceptic_emissions_mt(double total_mt, double sceptic_share) {
    if (sceptic_share < 0.0 || sceptic_share > 1.0)
        throw ConfigError("sceptic share must lie in [0,1]");
    return total_mt * sceptic_share;
}

double decoy_reduction_mt(double sceptic_mt, double uplift) {
    if (uplift < 0.0 || uplift > 1.0) throw ConfigError("uplift must lie in [0,1]");
    return sceptic_mt * uplift;
}

ImpactTable compute_impact(const std::map<Country, CountryImpactInputs>& inputs) {
    ImpactTable table;
    for (const auto& [country, in] : inputs) {
        ImpactRow row;
        row.country = country;
        row.inputs = in;
        row.total_mt = country_emissions_mt(in);
        row.sceptic_mt = sceptic_emissions_mt(row.total_mt, in.sceptic_share);
        row.reduction_mt = decoy_reduction_mt(row.sceptic_mt, in.uplift);
        table.total_mt += row.total_mt;
        table.sceptic_total_mt += row.sceptic_mt;
        table.reduction_total_mt += row.reduction_mt;
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_impact_csv(const std::string& path, const ImpactTable& table) {
    csv::Writer w(path);
    w.row({"country", "flights_per_person", "population", "sceptic_share", "mean_distance_km",
           "emission_factor_g_km", "uplift", "total_mt", "sceptic_mt", "reduction_mt",
           "provenance"});
    for (const auto& r : table.rows)
        w.row({country_code(r.country), format_double(r.inputs.flights_per_person),
               format_double(r.inputs.population), format_double(r.inputs.sceptic_share),
               format_double(r.inputs.mean_distance_km),
               format_double(r.inputs.emission_factor_g_km), format_double(r.inputs.uplift),
               format_double(r.total_mt, 6), format_double(r.sceptic_mt, 6),
               format_double(r.reduction_mt, 6), r.inputs.provenance});
    w.row({"total", "", "", "", "", "", "", format_double(table.total_mt, 6),
           format_double(table.sceptic_total_mt, 6), format_double(table.reduction_total_mt, 6),
           ""});
}

}  // namespace offsetsim
