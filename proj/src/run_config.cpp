#include "offsetsim/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "offsetsim/errors.hpp"
#include "offsetsim/rng.hpp"

namespace offsetsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// strips a trailing comment that is not inside a quoted string
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& token, double& out) {
    if (token.empty()) return false;
    char* end = nullptr;
    out = std::strtod(token.c_str(), &end);
    return end != nullptr && *end == '\0';
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError((origin.empty() ? "config" : origin) + ":" + std::to_string(line_no) +
                          ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail("empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key_part = trim(line.substr(0, eq));
        const std::string value_part = trim(line.substr(eq + 1));
        if (key_part.empty()) fail("empty key");
        if (value_part.empty()) fail("empty value for key '" + key_part + "'");
        const std::string key = section.empty() ? key_part : section + "." + key_part;

        Value v;
        v.raw = value_part;
        if (value_part.front() == '"') {
            if (value_part.size() < 2 || value_part.back() != '"')
                fail("unterminated string for key '" + key + "'");
            v.kind = Value::Kind::Text;
            v.str = value_part.substr(1, value_part.size() - 2);
        } else if (value_part == "true" || value_part == "false") {
            v.kind = Value::Kind::Boolean;
            v.flag = value_part == "true";
        } else if (value_part.front() == '[') {
            if (value_part.back() != ']') fail("unterminated list for key '" + key + "'");
            v.kind = Value::Kind::List;
            std::string body = value_part.substr(1, value_part.size() - 2);
            std::size_t pos = 0;
            while (pos <= body.size()) {
                std::size_t comma = body.find(',', pos);
                std::string item =
                    trim(comma == std::string::npos ? body.substr(pos)
                                                    : body.substr(pos, comma - pos));
                if (!item.empty()) {
                    double num = 0.0;
                    if (!item.empty() && item.front() == '"') {
                        if (item.size() < 2 || item.back() != '"')
                            fail("bad string list item for key '" + key + "'");
                        v.strs.push_back(item.substr(1, item.size() - 2));
                    } else if (parse_number(item, num)) {
                        v.nums.push_back(num);
                    } else {
                        fail("unparseable list item '" + item + "' for key '" + key + "'");
                    }
                }
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        } else {
            double num = 0.0;
            if (!parse_number(value_part, num))
                fail("unparseable value '" + value_part + "' for key '" + key + "'");
            v.kind = Value::Kind::Number;
            v.num = num;
        }
        cfg.values_[key] = std::move(v);
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.contains(key); }

double KeyValueConfig::number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.kind != Value::Kind::Number)
        throw ConfigError("config key '" + key + "' must be a number");
    return it->second.num;
}

long long KeyValueConfig::integer(const std::string& key, long long fallback) const {
    return static_cast<long long>(number(key, static_cast<double>(fallback)));
}

bool KeyValueConfig::boolean(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.kind != Value::Kind::Boolean)
        throw ConfigError("config key '" + key + "' must be true or false");
    return it->second.flag;
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.kind != Value::Kind::Text)
        throw ConfigError("config key '" + key + "' must be a quoted string");
    return it->second.str;
}

std::vector<double> KeyValueConfig::number_list(const std::string& key,
                                                const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.kind != Value::Kind::List || !it->second.strs.empty())
        throw ConfigError("config key '" + key + "' must be a list of numbers");
    return it->second.nums;
}

std::vector<std::string> KeyValueConfig::text_list(const std::string& key,
                                                   const std::vector<std::string>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.kind != Value::Kind::List || !it->second.nums.empty())
        throw ConfigError("config key '" + key + "' must be a list of strings");
    return it->second.strs;
}

std::string KeyValueConfig::canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        if (key == "run.concurrency") continue;  // execution detail, never affects results
        out += key + " = " + value.raw + "\n";
    }
    return out;
}

std::vector<std::string> KeyValueConfig::keys() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [key, value] : values_) out.push_back(key);
    return out;
}

// ---------------------------------------------------------------------------
// RunConfig assembly
// ---------------------------------------------------------------------------

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.scenario.fx = default_fx_table();

    auto impact = [&](Country c, double flights, double pop_m, double share, double uplift) {
        CountryImpactInputs in;
        in.flights_per_person = flights;
        in.population = pop_m * 1e6;
        in.sceptic_share = share;
        in.mean_distance_km = 1857.0;
        in.emission_factor_g_km = 90.0;
        in.uplift = uplift;
        in.provenance =
            "flights: ourworldindata.org/grapher/air-trips-per-capita; population: "
            "worldpopulationreview.com/countries; distance: atag.org/facts-figures; factor: "
            "theicct.org CO2-commercial-aviation-oct2020";
        cfg.impact_inputs[c] = in;
    };
    impact(Country::CN, 0.46, 1416.1, 0.24, 0.0);
    impact(Country::DE, 1.35, 84.1, 0.39, 0.07);
    impact(Country::IN, 0.14, 1463.8, 0.14, 0.0);
    impact(Country::SG, 4.21, 5.8, 0.31, 0.08);
    impact(Country::US, 2.06, 347.2, 0.35, 0.04);
    return cfg;
}

namespace {

Country country_key(const std::string& token) { return country_from_code(token); }

void overlay(RunConfig& cfg, const KeyValueConfig& kv) {
    cfg.master_seed =
        static_cast<std::uint64_t>(kv.integer("run.master_seed", static_cast<long long>(cfg.master_seed)));
    if (kv.has("run.master_seed")) cfg.seed_explicit = true;
    cfg.concurrency = static_cast<int>(kv.integer("run.concurrency", cfg.concurrency));

    const std::string backend = kv.text("agent.backend", cfg.agent.backend == AgentBackend::Synthetic
                                                             ? "synthetic"
                                                             : "remote_llm");
    if (backend == "synthetic")
        cfg.agent.backend = AgentBackend::Synthetic;
    else if (backend == "remote_llm")
        cfg.agent.backend = AgentBackend::RemoteLlm;
    else
        throw ConfigError("agent.backend must be \"synthetic\" or \"remote_llm\"");
    cfg.agent.model_name = kv.text("agent.model", cfg.agent.model_name);
    cfg.agent.temperature = kv.number("agent.temperature", cfg.agent.temperature);
    cfg.agent.max_retries = static_cast<int>(kv.integer("agent.max_retries", cfg.agent.max_retries));
    cfg.agent.cache_enabled = kv.boolean("agent.cache_enabled", cfg.agent.cache_enabled);
    cfg.agent.base_url = kv.text("agent.base_url", cfg.agent.base_url);
    cfg.agent.api_path = kv.text("agent.api_path", cfg.agent.api_path);
    cfg.agent.request_timeout_s =
        static_cast<int>(kv.integer("agent.request_timeout_s", cfg.agent.request_timeout_s));
    cfg.agent.retry_initial_delay_ms = static_cast<int>(
        kv.integer("agent.retry_initial_delay_ms", cfg.agent.retry_initial_delay_ms));
    cfg.agent.rate_limit_rps = kv.number("agent.rate_limit_rps", cfg.agent.rate_limit_rps);
    cfg.agent.max_concurrent_requests = static_cast<int>(
        kv.integer("agent.max_concurrent_requests", cfg.agent.max_concurrent_requests));

    cfg.synthetic.beta_price = kv.number("synthetic.beta_price", cfg.synthetic.beta_price);
    cfg.synthetic.beta_offset = kv.number("synthetic.beta_offset", cfg.synthetic.beta_offset);
    cfg.synthetic.trust_shift = kv.number("synthetic.trust_shift", cfg.synthetic.trust_shift);
    cfg.synthetic.concern_shift =
        kv.number("synthetic.concern_shift", cfg.synthetic.concern_shift);
    cfg.synthetic.income_shift = kv.number("synthetic.income_shift", cfg.synthetic.income_shift);
    cfg.synthetic.age_shift = kv.number("synthetic.age_shift", cfg.synthetic.age_shift);
    cfg.synthetic.gender_shift = kv.number("synthetic.gender_shift", cfg.synthetic.gender_shift);
    for (Country c : kCountries) {
        const std::string key = std::string("synthetic.country_shift_") + country_code(c);
        if (kv.has(key)) cfg.synthetic.country_shift[c] = kv.number(key, 0.0);
    }

    cfg.area1_offset_ladder = kv.number_list("decoy.area1_offset_ladder", cfg.area1_offset_ladder);

    cfg.schedule.situations =
        static_cast<int>(kv.integer("schedule.situations", cfg.schedule.situations));
    cfg.schedule.orders_per_situation = static_cast<int>(
        kv.integer("schedule.orders_per_situation", cfg.schedule.orders_per_situation));
    cfg.schedule.repetitions =
        static_cast<int>(kv.integer("schedule.repetitions", cfg.schedule.repetitions));

    auto& r = cfg.scenario.ranges;
    r.flight_hours_min = static_cast<int>(kv.integer("ranges.flight_hours_min", r.flight_hours_min));
    r.flight_hours_max = static_cast<int>(kv.integer("ranges.flight_hours_max", r.flight_hours_max));
    r.emission_min = kv.number("ranges.emission_min", r.emission_min);
    r.emission_max = kv.number("ranges.emission_max", r.emission_max);
    r.price_min = kv.number("ranges.price_min", r.price_min);
    r.price_max = kv.number("ranges.price_max", r.price_max);
    r.offset_min = kv.number("ranges.offset_min", r.offset_min);
    r.offset_max = kv.number("ranges.offset_max", r.offset_max);
    cfg.scenario.bottles_per_kg = kv.number("scenario.bottles_per_kg", cfg.scenario.bottles_per_kg);

    for (Country c : kCountries) {
        const std::string base = std::string("fx.") + country_code(c);
        if (kv.has(base + "_coefficient") || kv.has(base + "_currency")) {
            FxEntry entry = cfg.scenario.fx.count(c) ? cfg.scenario.fx[c] : FxEntry{};
            entry.coefficient = kv.number(base + "_coefficient", entry.coefficient);
            entry.currency = kv.text(base + "_currency", entry.currency);
            cfg.scenario.fx[c] = entry;
        }
    }

    if (kv.has("run.countries")) {
        cfg.countries.clear();
        for (const std::string& code : kv.text_list("run.countries", {}))
            cfg.countries.push_back(country_key(code));
    }

    cfg.limits.max_segments =
        static_cast<int>(kv.integer("sweep.max_segments", cfg.limits.max_segments));
    cfg.limits.max_cells = static_cast<int>(kv.integer("sweep.max_cells", cfg.limits.max_cells));

    cfg.analysis.n_permutations =
        static_cast<int>(kv.integer("analysis.n_permutations", cfg.analysis.n_permutations));
    cfg.analysis.bootstrap_samples =
        static_cast<int>(kv.integer("analysis.bootstrap_samples", cfg.analysis.bootstrap_samples));
    cfg.analysis.bootstrap_level =
        kv.number("analysis.bootstrap_level", cfg.analysis.bootstrap_level);
    cfg.analysis.segment_top_k =
        static_cast<int>(kv.integer("analysis.segment_top_k", cfg.analysis.segment_top_k));

    cfg.paths.output_dir = kv.text("paths.output_dir", cfg.paths.output_dir);
    cfg.paths.respondents_csv = kv.text("paths.respondents_csv", cfg.paths.respondents_csv);
    cfg.paths.groups_csv = kv.text("paths.groups_csv", cfg.paths.groups_csv);
    cfg.paths.cache_file = kv.text("paths.cache_file", cfg.paths.cache_file);

    for (Country c : kCountries) {
        const std::string base = std::string("impact.") + country_code(c) + "_";
        auto& in = cfg.impact_inputs[c];
        in.flights_per_person = kv.number(base + "flights_per_person", in.flights_per_person);
        in.population = kv.number(base + "population", in.population);
        in.sceptic_share = kv.number(base + "sceptic_share", in.sceptic_share);
        in.uplift = kv.number(base + "uplift", in.uplift);
        in.mean_distance_km =
            kv.number("impact.mean_distance_km", in.mean_distance_km);
        in.emission_factor_g_km =
            kv.number("impact.emission_factor_g_km", in.emission_factor_g_km);
        in.mean_distance_km = kv.number(base + "mean_distance_km", in.mean_distance_km);
        in.emission_factor_g_km =
            kv.number(base + "emission_factor_g_km", in.emission_factor_g_km);
    }
}

}  // namespace

void RunConfig::validate(bool for_simulate) const {
    if (area1_offset_ladder.size() != 6)
        throw ConfigError("decoy.area1_offset_ladder must hold 6 values");
    enumerate_cells(area1_offset_ladder);  // full ladder validation
    if (schedule.situations < 1 || schedule.orders_per_situation < 1 || schedule.repetitions < 1)
        throw ConfigError("schedule counts must be >= 1");
    draw_situations(master_seed, schedule.situations, scenario.ranges);  // range validation
    if (countries.empty()) throw ConfigError("run.countries must not be empty");
    for (Country c : countries)
        if (!scenario.fx.contains(c))
            throw ConfigError(std::string("fx table has no entry for country ") +
                              country_code(c));
    if (concurrency < 1) throw ConfigError("run.concurrency must be >= 1");
    if (analysis.n_permutations < 1 || analysis.bootstrap_samples < 1)
        throw ConfigError("analysis iteration counts must be >= 1");
    if (!(analysis.bootstrap_level > 0.0 && analysis.bootstrap_level < 1.0))
        throw ConfigError("analysis.bootstrap_level must be in (0,1)");
    if (agent.temperature < 0.0) throw ConfigError("agent.temperature must be >= 0");
    if (agent.max_retries < 0) throw ConfigError("agent.max_retries must be >= 0");
    if (for_simulate && !seed_explicit)
        throw ConfigError("simulate requires an explicit master seed (run.master_seed or --seed)");
    if (for_simulate && agent.backend == AgentBackend::RemoteLlm && agent.api_key.empty())
        throw ConfigError(
            "remote backend requires an API key (OFFSETSIM_API_KEY or OPENAI_API_KEY)");
    for (const auto& [country, in] : impact_inputs) {
        (void)country;
        country_emissions_mt(in);  // validates non-negativity and shares
    }
}

RunConfig load_run_config(const std::string& config_path) {
    RunConfig cfg = default_run_config();
    std::string canonical = "defaults";
    if (!config_path.empty()) {
        const KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
        overlay(cfg, kv);
        canonical = kv.canonical();
    }
    if (cfg.agent.backend == AgentBackend::RemoteLlm) apply_agent_env(cfg.agent);
    if (cfg.paths.groups_csv.empty())
        cfg.paths.groups_csv = cfg.paths.output_dir + "/predicted_groups.csv";
    if (cfg.paths.cache_file.empty())
        cfg.paths.cache_file = cfg.paths.output_dir + "/state/response_cache.jsonl";
    cfg.agent.cache_path = cfg.paths.cache_file;

    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    cfg.config_hash = hash;
    return cfg;
}

}  // namespace offsetsim
