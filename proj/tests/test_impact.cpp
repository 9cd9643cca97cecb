#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "offsetsim/csv.hpp"
#include "offsetsim/errors.hpp"
#include "offsetsim/impact.hpp"
#include "offsetsim/run_config.hpp"

using namespace offsetsim;

TEST_CASE("country emissions arithmetic") {
    CountryImpactInputs cn{0.46, 1416.1e6, 0.24, 1857.0, 90.0, 0.0, ""};
    CHECK(country_emissions_mt(cn) == doctest::Approx(108.9).epsilon(0.001));

    CountryImpactInputs sg{4.21, 5.8e6, 0.31, 1857.0, 90.0, 0.08, ""};
    CHECK(country_emissions_mt(sg) == doctest::Approx(4.08).epsilon(0.01));

    CountryImpactInputs empty{1.0, 0.0, 0.1, 1857.0, 90.0, 0.0, ""};
    CHECK(country_emissions_mt(empty) == doctest::Approx(0.0));

    CountryImpactInputs bad = cn;
    bad.sceptic_share = 1.5;
    CHECK_THROWS_AS(country_emissions_mt(bad), ConfigError);
}

TEST_CASE("sceptic and reduction stages") {
    CHECK(sceptic_emissions_mt(119.7, 0.35) == doctest::Approx(41.9).epsilon(0.001));
    CHECK(sceptic_emissions_mt(108.9, 0.24) == doctest::Approx(26.1).epsilon(0.002));
    CHECK(sceptic_emissions_mt(100.0, 0.0) == doctest::Approx(0.0));
    CHECK(decoy_reduction_mt(7.4, 0.07) == doctest::Approx(0.52).epsilon(0.01));
    CHECK(decoy_reduction_mt(41.9, 0.04) == doctest::Approx(1.68).epsilon(0.01));
    CHECK(decoy_reduction_mt(26.1, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(decoy_reduction_mt(1.0, -0.1), ConfigError);
}

TEST_CASE("linearity: doubling population doubles emissions exactly") {
    CountryImpactInputs in{1.35, 84.1e6, 0.39, 1857.0, 90.0, 0.07, ""};
    CountryImpactInputs doubled = in;
    doubled.population *= 2.0;
    CHECK(country_emissions_mt(doubled) == doctest::Approx(2.0 * country_emissions_mt(in)));
}

TEST_CASE("full table totals and csv export") {
    const RunConfig cfg = default_run_config();
    const ImpactTable table = compute_impact(cfg.impact_inputs);
    REQUIRE(table.rows.size() == 5);
    CHECK(std::fabs(table.reduction_total_mt - 2.3) < 0.05);
    CHECK(table.sceptic_total_mt > 80.0);

    write_impact_csv("impact_test.csv", table);
    const auto csv = csv::read_file("impact_test.csv");
    CHECK(csv.header.front() == "country");
    CHECK(csv.rows.size() == 6);  // 5 countries + total row
    CHECK(csv.rows.back().front() == "total");
    std::filesystem::remove("impact_test.csv");
}
