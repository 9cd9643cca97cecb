#include "offsetsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "offsetsim/errors.hpp"
#include "offsetsim/rng.hpp"

namespace offsetsim {

using nlohmann::json;

namespace {

std::uint64_t task_seed(const SweepContext& ctx, const Segment& segment,
                        const std::optional<DecoyCell>& cell) {
    const std::uint64_t cell_tag =
        cell ? static_cast<std::uint64_t>(cell->index) + 1 : 0;  // 0 = baseline
    return seed_mix(seed_mix(ctx.master_seed, fnv1a64(segment.key())), cell_tag);
}

}  // namespace

std::vector<std::vector<OptionRole>> option_orders(const SweepContext& ctx,
                                                   const Segment& segment,
                                                   const std::optional<DecoyCell>& cell,
                                                   int draw_index) {
    std::vector<OptionRole> base{OptionRole::Target, OptionRole::Competitor};
    if (cell) base.push_back(OptionRole::Decoy);

    std::vector<std::vector<OptionRole>> orders;
    orders.reserve(static_cast<std::size_t>(ctx.schedule.orders_per_situation));
    const std::uint64_t seed =
        seed_mix(task_seed(ctx, segment, cell), 0x0DDE0000ULL + static_cast<std::uint64_t>(draw_index));
    for (int o = 0; o < ctx.schedule.orders_per_situation; ++o) {
        SplitMix rng(seed_mix(seed, static_cast<std::uint64_t>(o)));
        std::vector<OptionRole> order = base;
        rng.shuffle(order);
        orders.push_back(std::move(order));
    }
    return orders;
}

ResponseTally run_cell(const SweepContext& ctx, const Segment& segment,
                       const std::optional<DecoyCell>& cell,
                       const std::vector<SituationDraw>& draws, ChoiceAgent& agent) {
    if (static_cast<int>(draws.size()) != ctx.schedule.situations)
        throw ConfigError("run_cell: draw count does not match the schedule");

    const std::string system_prompt = render_system_prompt(segment);
    const std::uint64_t base_seed = task_seed(ctx, segment, cell);

    ResponseTally tally;
    for (const SituationDraw& draw : draws) {
        const ChoiceScenario scenario =
            build_scenario(draw, segment.country, cell, ctx.scenario);
        const auto orders = option_orders(ctx, segment, cell, draw.draw_index);
        const int k = scenario.option_count();

        for (int o = 0; o < ctx.schedule.orders_per_situation; ++o) {
            const std::string user_prompt = render_user_prompt(scenario, orders[o]);
            for (int rep = 0; rep < ctx.schedule.repetitions; ++rep) {
                const std::uint64_t sample_index = seed_mix(
                    seed_mix(base_seed, static_cast<std::uint64_t>(draw.draw_index) * 1000 +
                                            static_cast<std::uint64_t>(o)),
                    static_cast<std::uint64_t>(rep));
                const AgentResponse resp =
                    agent.choose(system_prompt, user_prompt, k, orders[o], sample_index);
                switch (resp.choice) {
                    case Choice::Target: ++tally.n_target; break;
                    case Choice::Competitor: ++tally.n_competitor; break;
                    case Choice::Decoy: ++tally.n_decoy; break;
                    case Choice::Invalid: ++tally.n_invalid; break;
                }
            }
        }
    }
    return tally;
}

OffsettingEstimate offsetting_probability(const ResponseTally& tally, ProbabilityMode mode) {
    const long long informative = tally.n_target + tally.n_competitor + tally.n_decoy;
    if (informative == 0) throw DataError("offsetting_probability: every response was invalid");

    OffsettingEstimate est;
    est.mode = mode;
    est.n_valid = informative;
    if (mode == ProbabilityMode::Pairwise) {
        if (tally.n_decoy != 0)
            throw DataError("offsetting_probability: decoy responses in a pairwise tally");
        est.probability = static_cast<double>(tally.n_target) / static_cast<double>(informative);
    } else {
        const long long denom = tally.n_target + tally.n_competitor;
        est.probability =
            denom > 0 ? static_cast<double>(tally.n_target) / static_cast<double>(denom) : 0.0;
    }
    return est;
}

EffectsResult cell_effects(const std::map<std::string, OffsettingEstimate>& baseline,
                           const std::map<std::string, std::map<int, OffsettingEstimate>>& per_cell,
                           const std::vector<DecoyCell>& cells) {
    EffectsResult result;
    std::map<Country, std::vector<std::vector<double>>> country_acc;  // per cell, deltas

    for (const auto& [segment_key, cell_estimates] : per_cell) {
        const auto base_it = baseline.find(segment_key);
        if (base_it == baseline.end())
            throw DataError("cell_effects: no baseline estimate for segment " + segment_key);

        std::vector<CellEffect> effects;
        effects.reserve(cells.size());
        for (const DecoyCell& cell : cells) {
            const auto est_it = cell_estimates.find(cell.index);
            if (est_it == cell_estimates.end())
                throw DataError("cell_effects: segment " + segment_key +
                                " is missing cell " + cell.id());
            effects.push_back({cell, est_it->second.probability - base_it->second.probability});
        }

        const Country country = segment_from_key(segment_key).country;
        auto& acc = country_acc[country];
        acc.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) acc[i].push_back(effects[i].delta);
        result.per_segment.emplace(segment_key, std::move(effects));
    }
    for (const auto& [segment_key, est] : baseline)
        if (!per_cell.contains(segment_key))
            throw DataError("cell_effects: no per-cell estimates for segment " + segment_key);

    for (auto& [country, acc] : country_acc) {
        std::vector<CellEffect> effects;
        effects.reserve(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double sum = 0.0;
            for (double d : acc[i]) sum += d;
            effects.push_back({cells[i], sum / static_cast<double>(acc[i].size())});
        }
        result.per_country.emplace(country, std::move(effects));
    }
    return result;
}

namespace {

std::vector<std::size_t> ranked_indices(const std::vector<CellEffect>& effects,
                                        bool largest_first) {
    std::vector<std::size_t> idx(effects.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (effects[a].delta != effects[b].delta)
            return largest_first ? effects[a].delta > effects[b].delta
                                 : effects[a].delta < effects[b].delta;
        return effects[a].cell.index < effects[b].cell.index;  // stable-order tie rule
    });
    return idx;
}

}  // namespace

CellSelection select_country_cells(const std::vector<CellEffect>& effects,
                                   std::size_t expected_cells, int top_k) {
    if (effects.size() != expected_cells)
        throw DataError("select_country_cells: expected " + std::to_string(expected_cells) +
                        " cells, got " + std::to_string(effects.size()));
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(top_k), effects.size());
    CellSelection sel;
    const auto best = ranked_indices(effects, true);
    const auto worst = ranked_indices(effects, false);
    for (std::size_t i = 0; i < k; ++i) {
        sel.optimal.push_back(effects[best[i]].cell);
        sel.non_optimal.push_back(effects[worst[i]].cell);
    }
    return sel;
}

SegmentOptimalResult select_segment_optimal(
    const std::map<std::string, std::vector<CellEffect>>& effects, int top_k) {
    SegmentOptimalResult result;
    for (const auto& [segment_key, segment_effects] : effects) {
        const auto best = ranked_indices(segment_effects, true);
        const std::size_t k =
            std::min<std::size_t>(static_cast<std::size_t>(top_k), segment_effects.size());
        std::vector<DecoyCell> cells;
        for (std::size_t i = 0; i < k; ++i) {
            const DecoyCell& cell = segment_effects[best[i]].cell;
            cells.push_back(cell);
            ++result.cell_counts[cell.index];
        }
        result.per_segment.emplace(segment_key, std::move(cells));
    }
    return result;
}

std::map<std::string, PredictedGroups> predicted_groups(
    const std::map<std::string, OffsettingEstimate>& baseline,
    const std::map<std::string, double>& country_optimal_delta) {
    std::map<std::string, PredictedGroups> groups;
    for (const auto& [segment_key, est] : baseline) {
        const auto delta_it = country_optimal_delta.find(segment_key);
        if (delta_it == country_optimal_delta.end())
            throw DataError("predicted_groups: no country-optimal delta for " + segment_key);
        PredictedGroups g;
        g.offset_group = est.probability == 1.0 ? 1 : 2;
        g.decoy_group = delta_it->second > 0.0 ? 1 : 2;
        groups.emplace(segment_key, g);
    }
    for (const auto& [segment_key, delta] : country_optimal_delta)
        if (!baseline.contains(segment_key))
            throw DataError("predicted_groups: no baseline for " + segment_key);
    return groups;
}

// ---------------------------------------------------------------------------
// checkpointing + parallel execution
// ---------------------------------------------------------------------------

CheckpointStore::CheckpointStore(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        ResponseTally t;
        t.n_target = j.value("t", 0LL);
        t.n_competitor = j.value("c", 0LL);
        t.n_decoy = j.value("d", 0LL);
        t.n_invalid = j.value("i", 0LL);
        entries_[{j.value("segment", ""), j.value("cell", -1)}] = t;
    }
}

std::optional<ResponseTally> CheckpointStore::lookup(const std::string& segment_key,
                                                     int cell_index) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find({segment_key, cell_index});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void CheckpointStore::record(const std::string& segment_key, int cell_index,
                             const ResponseTally& tally) {
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(std::make_pair(segment_key, cell_index), tally).second) return;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ConfigError("cannot append to checkpoint file: " + path_);
    out << json{{"segment", segment_key}, {"cell", cell_index}, {"t", tally.n_target},
                {"c", tally.n_competitor}, {"d", tally.n_decoy}, {"i", tally.n_invalid}}
               .dump()
        << '\n';
}

SweepResults run_sweep(const SweepContext& ctx, const std::vector<Segment>& segments,
                       const std::vector<DecoyCell>& cells,
                       const std::vector<SituationDraw>& draws, ChoiceAgent& agent,
                       int concurrency, CheckpointStore* checkpoint) {
    struct Task {
        Segment segment;
        std::optional<DecoyCell> cell;
    };
    std::vector<Task> tasks;
    tasks.reserve(segments.size() * (cells.size() + 1));
    for (const Segment& s : segments) {
        tasks.push_back({s, std::nullopt});
        for (const DecoyCell& c : cells) tasks.push_back({s, c});
    }

    std::vector<ResponseTally> tallies(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= tasks.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            const Task& task = tasks[i];
            const int cell_index = task.cell ? task.cell->index : -1;
            try {
                if (checkpoint) {
                    if (auto cached = checkpoint->lookup(task.segment.key(), cell_index)) {
                        tallies[i] = *cached;
                        continue;
                    }
                }
                tallies[i] = run_cell(ctx, task.segment, task.cell, draws, agent);
                if (checkpoint) checkpoint->record(task.segment.key(), cell_index, tallies[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::max(1, concurrency);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // deterministic reduction in task order
    SweepResults results;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        if (task.cell)
            results.per_cell[task.segment.key()][task.cell->index] = tallies[i];
        else
            results.baseline[task.segment.key()] = tallies[i];
    }
    return results;
}

}  // namespace offsetsim
