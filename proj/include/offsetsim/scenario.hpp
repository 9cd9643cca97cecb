#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "offsetsim/decoy_grid.hpp"
#include "offsetsim/segments.hpp"

namespace offsetsim {

enum class OptionRole : std::uint8_t { Target, Competitor, Decoy };

const char* role_name(OptionRole r);
OptionRole role_from_name(const std::string& name);

// Ranges the situation parameters are drawn from. The numeric defaults are
// config defaults, not published values; override them in the run config.
struct MultiplierRanges {
    int flight_hours_min = 1;  // whole hours
    int flight_hours_max = 14;
    double emission_min = 60.0;  // kg CO2 per flight hour
    double emission_max = 120.0;
    double price_min = 50.0;  // base currency per flight hour
    double price_max = 150.0;
    double offset_min = 0.01;  // base currency per kg offset
    double offset_max = 0.03;
};

struct SituationDraw {
    int draw_index = 0;
    double flight_hours = 0.0;  // integer-valued
    double emission_multiplier = 0.0;
    double price_multiplier = 0.0;
    double offset_multiplier = 0.0;
};

struct TicketOption {
    double price = 0.0;
    double offset_fraction = 0.0;  // share of flight emissions offset
};

struct FxEntry {
    double coefficient = 1.0;  // multiplier applied to base (Singapore) prices
    std::string currency;      // ISO code used in the rendered prompt
};

using FxTable = std::map<Country, FxEntry>;

struct ScenarioConfig {
    MultiplierRanges ranges;
    double bottles_per_kg = 50.0;  // plastic-bottle equivalence used in the prompt
    FxTable fx;
};

FxTable default_fx_table();

// A fully specified booking situation: the two base tickets plus an optional
// decoy, all priced in the country's currency.
struct ChoiceScenario {
    double flight_hours = 0.0;
    double emissions_kg = 0.0;
    long long bottles_number = 0;
    std::string currency;
    TicketOption target;      // full offset
    TicketOption competitor;  // no offset
    std::optional<TicketOption> decoy;
    std::optional<DecoyCell> decoy_cell;

    int option_count() const { return decoy ? 3 : 2; }
    const TicketOption& option(OptionRole r) const;
};

// n seeded draws; each draw uses its own substream so the list is a pure
// function of (seed, n, ranges).
std::vector<SituationDraw> draw_situations(std::uint64_t seed, int n,
                                           const MultiplierRanges& ranges);

ChoiceScenario build_scenario(const SituationDraw& draw, Country country,
                              const std::optional<DecoyCell>& cell, const ScenarioConfig& cfg);

// Renders the booking prompt with options numbered 1..k in `order`. Prices
// render with two decimals, emissions as whole kg, the decoy offset as a
// percentage of the flight's emissions.
std::string render_user_prompt(const ChoiceScenario& scenario,
                               const std::vector<OptionRole>& order);

// JSON-lines round trip for scenario batches (one scenario per line).
std::string scenario_to_json_line(const ChoiceScenario& s);
ChoiceScenario scenario_from_json_line(const std::string& line);
void write_scenarios_jsonl(const std::string& path, const std::vector<ChoiceScenario>& batch);
std::vector<ChoiceScenario> read_scenarios_jsonl(const std::string& path);

}  // namespace offsetsim
