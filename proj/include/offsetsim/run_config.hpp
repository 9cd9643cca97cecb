#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "offsetsim/agents.hpp"
#include "offsetsim/impact.hpp"
#include "offsetsim/scenario.hpp"
#include "offsetsim/sweep.hpp"

namespace offsetsim {

// Minimal TOML-style key-value file: [section] headers, `key = value` lines,
// `#` comments. Values: numbers, "strings", true/false, and flat
// [v1, v2, ...] lists. Keys are addressed as "section.key".
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "");

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    long long integer(const std::string& key, long long fallback) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> number_list(const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<std::string> text_list(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

    // canonical "key = raw" lines, sorted; input to the config hash
    std::string canonical() const;
    std::vector<std::string> keys() const;

private:
    struct Value {
        std::string raw;
        enum class Kind { Number, Boolean, Text, List } kind = Kind::Text;
        double num = 0.0;
        bool flag = false;
        std::string str;
        std::vector<double> nums;
        std::vector<std::string> strs;
    };
    std::map<std::string, Value> values_;
};

struct AnalysisConfig {
    int n_permutations = 1000;
    int bootstrap_samples = 5000;
    double bootstrap_level = 0.95;
    int segment_top_k = 5;
};

struct PathsConfig {
    std::string output_dir = "out";
    std::string respondents_csv;  // analyze input
    std::string groups_csv;       // defaults to <output_dir>/predicted_groups.csv
    std::string cache_file;       // defaults to <output_dir>/state/response_cache.jsonl
};

struct SweepLimits {
    int max_segments = 0;  // 0 = all 160; smoke-test knob
    int max_cells = 0;     // 0 = the whole grid
};

struct RunConfig {
    std::uint64_t master_seed = 1;
    bool seed_explicit = false;  // simulate refuses to run on an implicit seed
    int concurrency = 1;
    AgentConfig agent;
    SyntheticCoefficients synthetic;
    std::vector<double> area1_offset_ladder{std::begin(kDefaultAreaILadder),
                                            std::end(kDefaultAreaILadder)};
    ScheduleConfig schedule;
    ScenarioConfig scenario;
    std::vector<Country> countries{kCountries.begin(), kCountries.end()};
    SweepLimits limits;
    AnalysisConfig analysis;
    PathsConfig paths;
    std::map<Country, CountryImpactInputs> impact_inputs;
    std::string config_hash;  // stable hash of the resolved configuration

    // throws ConfigError on any inconsistency a run would trip over later
    void validate(bool for_simulate) const;
};

// Built-in defaults; the accounting inputs ship with their published source
// notes so `impact` runs out of the box.
RunConfig default_run_config();

// defaults overlaid with the file's keys (empty path = pure defaults)
RunConfig load_run_config(const std::string& config_path);

}  // namespace offsetsim
