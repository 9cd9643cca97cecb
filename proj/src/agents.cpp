#include "offsetsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "offsetsim/errors.hpp"
#include "offsetsim/format.hpp"
#include "offsetsim/rng.hpp"

namespace offsetsim {

using nlohmann::json;

const char* choice_name(Choice c) {
    switch (c) {
        case Choice::Target: return "target";
        case Choice::Competitor: return "competitor";
        case Choice::Decoy: return "decoy";
        case Choice::Invalid: return "invalid";
    }
    return "?";
}

int parse_choice(const std::string& raw, int k) {
    std::size_t i = 0;
    while (i < raw.size()) {
        if (std::isdigit(static_cast<unsigned char>(raw[i]))) {
            long long value = 0;
            while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) {
                value = value * 10 + (raw[i] - '0');
                if (value > 1000) value = 1000;  // clamp; only [1,k] matters
                ++i;
            }
            if (value >= 1 && value <= k) return static_cast<int>(value);
        } else {
            ++i;
        }
    }
    return 0;
}

Choice map_reply_to_choice(int index, const std::vector<OptionRole>& order) {
    if (index < 1 || index > static_cast<int>(order.size())) return Choice::Invalid;
    switch (order[static_cast<std::size_t>(index - 1)]) {
        case OptionRole::Target: return Choice::Target;
        case OptionRole::Competitor: return Choice::Competitor;
        case OptionRole::Decoy: return Choice::Decoy;
    }
    return Choice::Invalid;
}

// ---------------------------------------------------------------------------
// synthetic backend
// ---------------------------------------------------------------------------

double synthetic_utility(const SyntheticCoefficients& c, const Segment& persona,
                         const TicketOption& option) {
    double taste = c.beta_offset;
    if (persona.trust == Trust::Trusts) taste += c.trust_shift;
    if (persona.concern == Concern::Concerned) taste += c.concern_shift;
    if (persona.income == IncomeBand::AboveMedian) taste += c.income_shift;
    if (persona.age == AgeBand::AboveMedian) taste += c.age_shift;
    if (persona.gender == Gender::Woman) taste += c.gender_shift;
    if (auto it = c.country_shift.find(persona.country); it != c.country_shift.end())
        taste += it->second;
    return c.beta_price * option.price + taste * option.offset_fraction;
}

std::vector<double> synthetic_choice_probabilities(const SyntheticCoefficients& c,
                                                   const Segment& persona,
                                                   const std::vector<TicketOption>& options,
                                                   double temperature) {
    if (options.empty()) throw DataError("no options to choose from");
    std::vector<double> u(options.size());
    for (std::size_t i = 0; i < options.size(); ++i)
        u[i] = synthetic_utility(c, persona, options[i]);

    std::vector<double> p(options.size(), 0.0);
    if (temperature <= 0.0) {
        p[static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin())] = 1.0;
        return p;
    }
    const double umax = *std::max_element(u.begin(), u.end());
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        p[i] = std::exp((u[i] - umax) / temperature);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

Segment parse_persona_prompt(const std::string& sp) {
    auto has = [&](const char* s) { return sp.find(s) != std::string::npos; };
    Segment seg{};
    bool matched = false;
    for (Country c : kCountries) {
        const std::string pattern = std::string("resides in ") + country_display_name(c) + ",";
        if (sp.find(pattern) != std::string::npos) {
            seg.country = c;
            matched = true;
            break;
        }
    }
    if (!matched) throw DataError("persona prompt: country not recognized");
    seg.gender = has("You are a woman") ? Gender::Woman : Gender::Man;
    seg.age = has("aged above median") ? AgeBand::AboveMedian : AgeBand::BelowMedian;
    seg.income = has("income is above median") ? IncomeBand::AboveMedian : IncomeBand::BelowMedian;
    seg.concern = has("cannot say that you concern") ? Concern::NotConcerned : Concern::Concerned;
    seg.trust = has("cannot say that you believe") ? Trust::NotTrusts : Trust::Trusts;
    return seg;
}

std::vector<ParsedOption> parse_scenario_options(const std::string& up) {
    std::vector<ParsedOption> options;
    for (int number = 1; number <= 3; ++number) {
        const std::string marker = format_int(number) + ". Pay ";
        const std::size_t pos = up.find(marker);
        if (pos == std::string::npos) break;
        ParsedOption opt;
        std::size_t cursor = pos + marker.size();
        opt.price = std::stod(up.substr(cursor));

        const std::size_t and_pos = up.find(" and ", cursor);
        if (and_pos == std::string::npos) throw DataError("scenario prompt: malformed option");
        const std::size_t tail = and_pos + 5;
        if (up.compare(tail, 5, "fully") == 0) {
            opt.role = OptionRole::Target;
            opt.offset_fraction = 1.0;
        } else if (up.compare(tail, 3, "not") == 0) {
            opt.role = OptionRole::Competitor;
            opt.offset_fraction = 0.0;
        } else if (up.compare(tail, 7, "offset ") == 0) {
            opt.role = OptionRole::Decoy;
            opt.offset_fraction = std::stod(up.substr(tail + 7)) / 100.0;
        } else {
            throw DataError("scenario prompt: unrecognized option kind");
        }
        options.push_back(opt);
    }
    if (options.size() < 2) throw DataError("scenario prompt: fewer than two options");
    return options;
}

AgentResponse SyntheticAgent::choose(const std::string& system_prompt,
                                     const std::string& user_prompt, int k_options,
                                     const std::vector<OptionRole>& order,
                                     std::uint64_t sample_index) {
    const Segment persona = parse_persona_prompt(system_prompt);
    const std::vector<ParsedOption> parsed = parse_scenario_options(user_prompt);
    if (static_cast<int>(parsed.size()) != k_options || order.size() != parsed.size())
        throw DataError("synthetic agent: option count mismatch");

    std::vector<TicketOption> options(parsed.size());
    for (std::size_t i = 0; i < parsed.size(); ++i)
        options[i] = {parsed[i].price, parsed[i].offset_fraction};
    const std::vector<double> probs =
        synthetic_choice_probabilities(coefficients_, persona, options, temperature_);

    // stream keyed by (prompts, sample_index): replications differ, reruns don't
    const std::uint64_t prompt_hash =
        seed_mix(fnv1a64(system_prompt), fnv1a64(user_prompt));
    SplitMix rng(seed_mix(prompt_hash, sample_index));
    const double u = rng.next_double();
    double acc = 0.0;
    std::size_t picked = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            picked = i;
            break;
        }
    }

    AgentResponse resp;
    resp.raw_text = format_int(static_cast<long long>(picked + 1));
    resp.attempt_count = 1;
    resp.choice = map_reply_to_choice(static_cast<int>(picked + 1), order);
    return resp;
}

// ---------------------------------------------------------------------------
// response cache
// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) { load(); }

void ResponseCache::load() {
    if (path_.empty()) return;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // nothing cached yet
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("key") || !j.contains("raw")) continue;
        entries_[j["key"].get<std::string>()] = j["raw"].get<std::string>();
    }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::insert(const std::string& key, const std::string& model,
                           std::uint64_t sample_index, const std::string& raw_text) {
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(key, raw_text).second) return;  // already recorded
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ConfigError("cannot append to cache file: " + path_);
    out << json{{"key", key}, {"model", model}, {"sample_index", sample_index},
                {"raw", raw_text}}
               .dump()
        << '\n';
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::string ResponseCache::make_key(const std::string& model, const std::string& system_prompt,
                                    const std::string& user_prompt,
                                    const std::vector<OptionRole>& order,
                                    std::uint64_t sample_index) {
    std::string order_tag;
    for (OptionRole r : order) order_tag += role_name(r)[0];
    const std::uint64_t h1 = seed_mix(fnv1a64(model), fnv1a64(system_prompt));
    const std::uint64_t h2 = seed_mix(fnv1a64(user_prompt), fnv1a64(order_tag));
    const std::uint64_t h3 = seed_mix(seed_mix(h1, h2), sample_index);
    const std::uint64_t h4 = seed_mix(h2, seed_mix(h1, ~sample_index));
    char buf[36];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h3),
                  static_cast<unsigned long long>(h4));
    return buf;
}

std::unique_ptr<ChoiceAgent> make_agent(const AgentConfig& cfg,
                                        const SyntheticCoefficients& coefficients) {
    if (cfg.backend == AgentBackend::Synthetic)
        return std::make_unique<SyntheticAgent>(coefficients, cfg.temperature);
    return std::make_unique<RemoteAgent>(cfg);
}

}  // namespace offsetsim
