#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "offsetsim/agents.hpp"
#include "offsetsim/decoy_grid.hpp"
#include "offsetsim/scenario.hpp"
#include "offsetsim/segments.hpp"

namespace offsetsim {

struct ResponseTally {
    long long n_target = 0;
    long long n_competitor = 0;
    long long n_decoy = 0;
    long long n_invalid = 0;

    long long total() const { return n_target + n_competitor + n_decoy + n_invalid; }
};

enum class ProbabilityMode : std::uint8_t { Pairwise, Decoy };

struct OffsettingEstimate {
    double probability = 0.0;
    long long n_valid = 0;
    ProbabilityMode mode = ProbabilityMode::Pairwise;
};

struct CellEffect {
    DecoyCell cell;
    double delta = 0.0;  // decoy-condition probability minus no-decoy probability
};

// 30 draws x 4 option orders x 25 repetitions = 3000 agent calls per cell.
struct ScheduleConfig {
    int situations = 30;
    int orders_per_situation = 4;
    int repetitions = 25;

    long long calls_per_cell() const {
        return static_cast<long long>(situations) * orders_per_situation * repetitions;
    }
};

struct SweepContext {
    ScenarioConfig scenario;
    ScheduleConfig schedule;
    std::uint64_t master_seed = 1;
};

// The 4 seeded option orders for one (segment, cell, situation).
std::vector<std::vector<OptionRole>> option_orders(const SweepContext& ctx,
                                                   const Segment& segment,
                                                   const std::optional<DecoyCell>& cell,
                                                   int draw_index);

// Executes the replication schedule for one (segment, cell) pair and tallies
// choices by semantic role. Deterministic for the synthetic backend: every
// call's stream is keyed by (master seed, segment, cell, draw, order, rep).
ResponseTally run_cell(const SweepContext& ctx, const Segment& segment,
                       const std::optional<DecoyCell>& cell,
                       const std::vector<SituationDraw>& draws, ChoiceAgent& agent);

// pairwise: target share of valid responses (requires a no-decoy tally);
// decoy: target share of target+competitor, zero when that denominator is
// empty. Errors when every response was invalid.
OffsettingEstimate offsetting_probability(const ResponseTally& tally, ProbabilityMode mode);

struct EffectsResult {
    // segment key -> effects in stable cell order
    std::map<std::string, std::vector<CellEffect>> per_segment;
    // unweighted mean over each country's segments
    std::map<Country, std::vector<CellEffect>> per_country;
};

EffectsResult cell_effects(const std::map<std::string, OffsettingEstimate>& baseline,
                           const std::map<std::string, std::map<int, OffsettingEstimate>>& per_cell,
                           const std::vector<DecoyCell>& cells);

struct CellSelection {
    std::vector<DecoyCell> optimal;      // largest delta first
    std::vector<DecoyCell> non_optimal;  // smallest delta first
};

// top-k / bottom-k by delta; ties break toward the smaller stable cell index.
// `effects` must cover the whole grid it was computed over.
CellSelection select_country_cells(const std::vector<CellEffect>& effects,
                                   std::size_t expected_cells, int top_k = 5);

struct SegmentOptimalResult {
    std::map<std::string, std::vector<DecoyCell>> per_segment;  // top-k cells per segment
    std::map<int, int> cell_counts;  // cell index -> number of segments where optimal
};

SegmentOptimalResult select_segment_optimal(
    const std::map<std::string, std::vector<CellEffect>>& effects, int top_k);

struct PredictedGroups {
    int offset_group = 2;  // 1 iff baseline probability is exactly 1
    int decoy_group = 2;   // 1 iff the country-optimal delta is > 0
};

std::map<std::string, PredictedGroups> predicted_groups(
    const std::map<std::string, OffsettingEstimate>& baseline,
    const std::map<std::string, double>& country_optimal_delta);

// ---------------------------------------------------------------------------
// full sweep execution
// ---------------------------------------------------------------------------

struct SweepResults {
    std::map<std::string, ResponseTally> baseline;                // segment key -> tally
    std::map<std::string, std::map<int, ResponseTally>> per_cell;  // -> cell index -> tally
};

// Per-(segment, cell) tallies persisted as JSON lines so an interrupted sweep
// resumes without repeating agent calls.
class CheckpointStore {
public:
    explicit CheckpointStore(std::string path);  // empty = disabled

    std::optional<ResponseTally> lookup(const std::string& segment_key, int cell_index) const;
    void record(const std::string& segment_key, int cell_index, const ResponseTally& tally);

private:
    std::string path_;
    std::map<std::pair<std::string, int>, ResponseTally> entries_;
    mutable std::mutex mutex_;
};

// Runs baseline + every grid cell for every segment, fanning (segment, cell)
// tasks across up to `concurrency` workers. Results are identical for any
// concurrency level.
SweepResults run_sweep(const SweepContext& ctx, const std::vector<Segment>& segments,
                       const std::vector<DecoyCell>& cells,
                       const std::vector<SituationDraw>& draws, ChoiceAgent& agent,
                       int concurrency, CheckpointStore* checkpoint = nullptr);

}  // namespace offsetsim
