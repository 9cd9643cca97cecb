#pragma once

#include <map>
#include <string>
#include <vector>

#include "offsetsim/segments.hpp"

namespace offsetsim {

// Per-country inputs of the annual CO2 accounting. Distance and emission
// factor default to the shared global scalars but may be overridden per
// country. `uplift` is the offsetting-probability increase achieved among
// sceptical travellers; 0 where no significant effect was found.
struct CountryImpactInputs {
    double flights_per_person = 0.0;  // flights per person per year
    double population = 0.0;          // persons
    double sceptic_share = 0.0;       // fraction in [0,1]
    double mean_distance_km = 0.0;    // km per flight
    double emission_factor_g_km = 0.0;  // g CO2 per passenger-km
    double uplift = 0.0;              // fraction in [0,1]
    std::string provenance;           // source notes carried into the report
};

// flights_per_person * population * mean_distance * emission_factor, in Mt/yr.
double country_emissions_mt(const CountryImpactInputs& inputs);

// total * sceptic share.
double sceptic_emissions_mt(double total_mt, double sceptic_share);

// sceptic emissions * uplift; non-significant countries contribute 0.
double decoy_reduction_mt(double sceptic_mt, double uplift);

struct ImpactRow {
    Country country = Country::SG;
    CountryImpactInputs inputs;
    double total_mt = 0.0;
    double sceptic_mt = 0.0;
    double reduction_mt = 0.0;
};

struct ImpactTable {
    std::vector<ImpactRow> rows;
    double total_mt = 0.0;
    double sceptic_total_mt = 0.0;
    double reduction_total_mt = 0.0;
};

ImpactTable compute_impact(const std::map<Country, CountryImpactInputs>& inputs);

// CSV mirroring the accounting columns, one row per country plus a total row.
void write_impact_csv(const std::string& path, const ImpactTable& table);

}  // namespace offsetsim
