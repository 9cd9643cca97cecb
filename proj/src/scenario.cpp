#include "offsetsim/scenario.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "offsetsim/errors.hpp"
#include "offsetsim/format.hpp"
#include "offsetsim/rng.hpp"

namespace offsetsim {

using nlohmann::json;

const char* role_name(OptionRole r) {
    switch (r) {
        case OptionRole::Target: return "target";
        case OptionRole::Competitor: return "competitor";
        case OptionRole::Decoy: return "decoy";
    }
    return "?";
}

OptionRole role_from_name(const std::string& name) {
    if (name == "target") return OptionRole::Target;
    if (name == "competitor") return OptionRole::Competitor;
    if (name == "decoy") return OptionRole::Decoy;
    throw DataError("unknown option role: " + name);
}

FxTable default_fx_table() {
    // Base prices are generated for Singapore; coefficients convert into each
    // country's currency. Values are config defaults, override per run.
    return {
        {Country::SG, {1.0, "SGD"}}, {Country::US, {0.74, "USD"}}, {Country::DE, {0.68, "EUR"}},
        {Country::CN, {5.35, "CNY"}}, {Country::IN, {62.0, "INR"}},
    };
}

const TicketOption& ChoiceScenario::option(OptionRole r) const {
    switch (r) {
        case OptionRole::Target: return target;
        case OptionRole::Competitor: return competitor;
        case OptionRole::Decoy:
            if (!decoy) throw DataError("scenario has no decoy option");
            return *decoy;
    }
    throw DataError("bad option role");
}

std::vector<SituationDraw> draw_situations(std::uint64_t seed, int n,
                                           const MultiplierRanges& r) {
    if (n < 1) throw ConfigError("situation count must be >= 1");
    if (r.flight_hours_min < 1 || r.flight_hours_max < r.flight_hours_min ||
        r.emission_max < r.emission_min || r.price_max < r.price_min ||
        r.offset_max < r.offset_min || r.emission_min <= 0.0 || r.price_min <= 0.0 ||
        r.offset_min <= 0.0)
        throw ConfigError("invalid situation parameter ranges");

    std::vector<SituationDraw> draws;
    draws.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        SplitMix rng(seed_mix(seed, static_cast<std::uint64_t>(i) + 0x5157ULL));
        SituationDraw d;
        d.draw_index = i;
        d.flight_hours = static_cast<double>(rng.next_int(r.flight_hours_min, r.flight_hours_max));
        d.emission_multiplier = rng.next_double(r.emission_min, r.emission_max);
        d.price_multiplier = rng.next_double(r.price_min, r.price_max);
        d.offset_multiplier = rng.next_double(r.offset_min, r.offset_max);
        draws.push_back(d);
    }
    return draws;
}

ChoiceScenario build_scenario(const SituationDraw& draw, Country country,
                              const std::optional<DecoyCell>& cell, const ScenarioConfig& cfg) {
    auto it = cfg.fx.find(country);
    if (it == cfg.fx.end())
        throw ConfigError(std::string("fx table has no entry for country ") +
                          country_code(country));
    const double fx = it->second.coefficient;

    ChoiceScenario s;
    s.flight_hours = draw.flight_hours;
    s.emissions_kg = draw.flight_hours * draw.emission_multiplier;
    s.bottles_number = std::llround(s.emissions_kg * cfg.bottles_per_kg);
    s.currency = it->second.currency;

    // Base (Singapore) prices: the standard fare scales with flight length,
    // the carbon-neutral fare adds the offset tariff applied to emissions.
    const double base_competitor = draw.flight_hours * draw.price_multiplier;
    const double base_target = base_competitor + s.emissions_kg * draw.offset_multiplier;
    s.competitor = {base_competitor * fx, 0.0};
    s.target = {base_target * fx, 1.0};

    if (cell) {
        s.decoy_cell = cell;
        s.decoy = TicketOption{decoy_price(s.target.price, s.competitor.price, cell->mu),
                               cell->offset_fraction};
    }
    return s;
}

namespace {

std::string option_line(const ChoiceScenario& s, OptionRole r) {
    const TicketOption& opt = s.option(r);
    std::string line = "Pay " + format_money(opt.price) + " " + s.currency + " and ";
    switch (r) {
        case OptionRole::Target: line += "fully offset emissions"; break;
        case OptionRole::Competitor: line += "not offset emissions"; break;
        case OptionRole::Decoy:
            line += "offset " + format_int(std::llround(opt.offset_fraction * 100.0)) +
                    "% emissions";
            break;
    }
    return line;
}

}  // namespace

std::string render_user_prompt(const ChoiceScenario& scenario,
                               const std::vector<OptionRole>& order) {
    const std::size_t k = order.size();
    if (static_cast<int>(k) != scenario.option_count())
        throw DataError("option order must cover every present option");

    std::string p = "You are planning a ";
    p += format_int(std::llround(scenario.flight_hours));
    p += "-hour flight. This flight produces ";
    p += format_int(std::llround(scenario.emissions_kg));
    p += " kg of CO₂ emissions which is equivalent to producing ";
    p += format_int(scenario.bottles_number);
    p += " plastic water bottles. Using all the information below, consider ";
    p += (k == 3 ? "three" : "two");
    p += " options: ";
    for (std::size_t i = 0; i < k; ++i) {
        p += format_int(static_cast<long long>(i + 1));
        p += ". ";
        p += option_line(scenario, order[i]);
        p += (i + 1 < k) ? "; " : ". ";
    }
    p += "Which option would you choose? Please give your answer only with the option number "
         "without any words.";
    return p;
}

namespace {

json ticket_to_json(const TicketOption& t) {
    return json{{"price", t.price}, {"offset_fraction", t.offset_fraction}};
}

TicketOption ticket_from_json(const json& j) {
    return {j.at("price").get<double>(), j.at("offset_fraction").get<double>()};
}

}  // namespace

std::string scenario_to_json_line(const ChoiceScenario& s) {
    json j{{"flight_hours", s.flight_hours},
           {"emissions_kg", s.emissions_kg},
           {"bottles_number", s.bottles_number},
           {"currency", s.currency},
           {"target", ticket_to_json(s.target)},
           {"competitor", ticket_to_json(s.competitor)}};
    if (s.decoy) j["decoy"] = ticket_to_json(*s.decoy);
    if (s.decoy_cell)
        j["decoy_cell"] = json{{"mu", s.decoy_cell->mu},
                               {"offset_fraction", s.decoy_cell->offset_fraction},
                               {"index", s.decoy_cell->index}};
    return j.dump();
}

ChoiceScenario scenario_from_json_line(const std::string& line) {
    json j = json::parse(line);
    ChoiceScenario s;
    s.flight_hours = j.at("flight_hours").get<double>();
    s.emissions_kg = j.at("emissions_kg").get<double>();
    s.bottles_number = j.at("bottles_number").get<long long>();
    s.currency = j.at("currency").get<std::string>();
    s.target = ticket_from_json(j.at("target"));
    s.competitor = ticket_from_json(j.at("competitor"));
    if (j.contains("decoy")) s.decoy = ticket_from_json(j.at("decoy"));
    if (j.contains("decoy_cell")) {
        const json& c = j.at("decoy_cell");
        s.decoy_cell = DecoyCell{c.at("mu").get<double>(),
                                 c.at("offset_fraction").get<double>(),
                                 c.value("index", -1)};
    }
    return s;
}

void write_scenarios_jsonl(const std::string& path, const std::vector<ChoiceScenario>& batch) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    for (const ChoiceScenario& s : batch) out << scenario_to_json_line(s) << '\n';
}

std::vector<ChoiceScenario> read_scenarios_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    std::vector<ChoiceScenario> batch;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        batch.push_back(scenario_from_json_line(line));
    }
    return batch;
}

}  // namespace offsetsim
