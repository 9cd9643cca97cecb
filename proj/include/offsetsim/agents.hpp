#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "offsetsim/scenario.hpp"
#include "offsetsim/segments.hpp"

namespace offsetsim {

enum class Choice : std::uint8_t { Target, Competitor, Decoy, Invalid };

const char* choice_name(Choice c);

struct AgentResponse {
    Choice choice = Choice::Invalid;
    std::string raw_text;
    double latency_ms = 0.0;
    int attempt_count = 0;
    bool from_cache = false;
};

enum class AgentBackend : std::uint8_t { RemoteLlm, Synthetic };

struct AgentConfig {
    AgentBackend backend = AgentBackend::Synthetic;
    std::string model_name = "gpt-4o-mini";
    double temperature = 0.8;
    int max_retries = 3;
    bool cache_enabled = true;
    std::string cache_path;  // empty = in-memory only
    std::string audit_log;   // when set, request/response pairs logged as JSON lines

    // remote transport
    std::string base_url = "http://127.0.0.1:8080";
    std::string api_path = "/v1/chat/completions";
    std::string api_key;
    int request_timeout_s = 60;
    int retry_initial_delay_ms = 500;
    double rate_limit_rps = 0.0;     // 0 = unlimited
    int max_concurrent_requests = 0;  // 0 = unlimited
};

// First integer token of `raw` that lies in [1, k]; 0 when none does.
int parse_choice(const std::string& raw, int k);

// Reply index (1-based) mapped through the presented order to a semantic role.
Choice map_reply_to_choice(int index, const std::vector<OptionRole>& order);

class ChoiceAgent {
public:
    virtual ~ChoiceAgent() = default;

    // `order` gives the semantic role of each numbered option in user_prompt.
    // sample_index distinguishes replications for caching and for the
    // synthetic sampling stream.
    virtual AgentResponse choose(const std::string& system_prompt, const std::string& user_prompt,
                                 int k_options, const std::vector<OptionRole>& order,
                                 std::uint64_t sample_index) = 0;
};

// ---------------------------------------------------------------------------
// synthetic logit backend
// ---------------------------------------------------------------------------

// Linear utility over ticket attributes with additive persona shifts on the
// offset taste. beta_price < 0, beta_offset > 0 in any sensible config.
struct SyntheticCoefficients {
    double beta_price = -0.05;
    double beta_offset = 5.0;
    double trust_shift = 3.0;    // applies when the persona trusts offset programs
    double concern_shift = 2.0;  // applies when the persona is concerned
    double income_shift = 0.5;   // above-median income
    double age_shift = 0.25;     // above-median age
    double gender_shift = 0.1;   // woman
    std::map<Country, double> country_shift;  // optional per-country taste shift
};

double synthetic_utility(const SyntheticCoefficients& c, const Segment& persona,
                         const TicketOption& option);

// softmax over the presented options at the given temperature; temperature 0
// degenerates to argmax (probability 1 on the first maximal option).
std::vector<double> synthetic_choice_probabilities(const SyntheticCoefficients& c,
                                                   const Segment& persona,
                                                   const std::vector<TicketOption>& options,
                                                   double temperature);

// Prompt readers used by the synthetic backend: it consumes exactly the bytes
// a remote model would see.
Segment parse_persona_prompt(const std::string& system_prompt);

struct ParsedOption {
    OptionRole role = OptionRole::Target;
    double price = 0.0;
    double offset_fraction = 0.0;
};

std::vector<ParsedOption> parse_scenario_options(const std::string& user_prompt);

class SyntheticAgent : public ChoiceAgent {
public:
    SyntheticAgent(SyntheticCoefficients coefficients, double temperature)
        : coefficients_(std::move(coefficients)), temperature_(temperature) {}

    AgentResponse choose(const std::string& system_prompt, const std::string& user_prompt,
                         int k_options, const std::vector<OptionRole>& order,
                         std::uint64_t sample_index) override;

private:
    SyntheticCoefficients coefficients_;
    double temperature_;
};

// ---------------------------------------------------------------------------
// response cache (append-only JSONL record store, atomic get-or-insert)
// ---------------------------------------------------------------------------

class ResponseCache {
public:
    // path may be empty for a purely in-memory cache.
    explicit ResponseCache(std::string path);

    std::optional<std::string> lookup(const std::string& key) const;
    void insert(const std::string& key, const std::string& model, std::uint64_t sample_index,
                const std::string& raw_text);
    std::size_t size() const;

    static std::string make_key(const std::string& model, const std::string& system_prompt,
                                const std::string& user_prompt,
                                const std::vector<OptionRole>& order,
                                std::uint64_t sample_index);

private:
    void load();

    std::string path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::string> entries_;
};

// ---------------------------------------------------------------------------
// remote chat backend
// ---------------------------------------------------------------------------

// Fills base_url / api_key from OFFSETSIM_API_BASE / OFFSETSIM_API_KEY with
// OPENAI_BASE_URL / OPENAI_API_KEY as fallbacks.
void apply_agent_env(AgentConfig& cfg);

class RemoteAgent : public ChoiceAgent {
public:
    explicit RemoteAgent(AgentConfig cfg);
    ~RemoteAgent() override;

    AgentResponse choose(const std::string& system_prompt, const std::string& user_prompt,
                         int k_options, const std::vector<OptionRole>& order,
                         std::uint64_t sample_index) override;

    // transport counters, observable by tests and the run manifest
    std::uint64_t requests_sent() const;
    std::uint64_t cache_hits() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<ChoiceAgent> make_agent(const AgentConfig& cfg,
                                        const SyntheticCoefficients& coefficients);

}  // namespace offsetsim
