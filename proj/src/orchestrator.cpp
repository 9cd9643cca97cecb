#include "offsetsim/orchestrator.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "offsetsim/csv.hpp"
#include "offsetsim/errors.hpp"
#include "offsetsim/format.hpp"
#include "offsetsim/rng.hpp"
#include "offsetsim/stats/bootstrap.hpp"
#include "offsetsim/study.hpp"

namespace offsetsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
}

std::vector<Segment> configured_segments(const RunConfig& cfg) {
    std::vector<Segment> segments;
    for (const Segment& s : enumerate_segments())
        if (std::find(cfg.countries.begin(), cfg.countries.end(), s.country) !=
            cfg.countries.end())
            segments.push_back(s);
    if (cfg.limits.max_segments > 0 &&
        static_cast<int>(segments.size()) > cfg.limits.max_segments) {
        // cap round-robin across countries so smoke runs keep full coverage
        std::map<Country, std::vector<Segment>> by_country;
        for (const Segment& s : segments) by_country[s.country].push_back(s);
        std::set<std::string> picked;
        for (std::size_t round = 0; static_cast<int>(picked.size()) < cfg.limits.max_segments;
             ++round) {
            bool any = false;
            for (auto& [country, list] : by_country) {
                if (round >= list.size()) continue;
                any = true;
                picked.insert(list[round].key());
                if (static_cast<int>(picked.size()) == cfg.limits.max_segments) break;
            }
            if (!any) break;
        }
        // keep the stable enumeration order
        std::erase_if(segments, [&](const Segment& s) { return !picked.contains(s.key()); });
    }
    if (segments.empty()) throw ConfigError("no segments selected by run.countries");
    return segments;
}

std::vector<DecoyCell> configured_cells(const RunConfig& cfg) {
    std::vector<DecoyCell> cells = enumerate_cells(cfg.area1_offset_ladder);
    if (cfg.limits.max_cells > 0 && static_cast<int>(cells.size()) > cfg.limits.max_cells)
        cells.resize(static_cast<std::size_t>(cfg.limits.max_cells));
    return cells;
}

// grid axes in stable render order: mu ascending columns, offsets descending rows
struct GridAxes {
    std::vector<double> mu_values;
    std::vector<double> offsets;
};

GridAxes grid_axes(const std::vector<DecoyCell>& cells) {
    std::set<double> mus, offs;
    for (const auto& c : cells) {
        mus.insert(c.mu);
        offs.insert(c.offset_fraction);
    }
    GridAxes axes;
    axes.mu_values.assign(mus.begin(), mus.end());
    axes.offsets.assign(offs.rbegin(), offs.rend());
    return axes;
}

template <typename ValueOf>
void write_heatmap_csv(const std::string& path, const std::vector<DecoyCell>& cells,
                       ValueOf&& value_of) {
    const GridAxes axes = grid_axes(cells);
    std::map<std::pair<double, double>, const DecoyCell*> by_coord;
    for (const auto& c : cells) by_coord[{c.mu, c.offset_fraction}] = &c;

    csv::Writer w(path);
    std::vector<std::string> header{"offset_fraction"};
    for (double mu : axes.mu_values) header.push_back("mu_" + format_double(mu));
    w.row(header);
    for (double off : axes.offsets) {
        std::vector<std::string> row{format_double(off)};
        for (double mu : axes.mu_values) {
            auto it = by_coord.find({mu, off});
            row.push_back(it == by_coord.end() ? "" : value_of(*it->second));
        }
        w.row(row);
    }
}

}  // namespace

void command_simulate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate(/*for_simulate=*/true);
    const fs::path out_dir(cfg.paths.output_dir);
    fs::create_directories(out_dir / "state");

    const std::vector<Segment> segments = configured_segments(cfg);
    const std::vector<DecoyCell> cells = configured_cells(cfg);
    const std::vector<SituationDraw> draws =
        draw_situations(cfg.master_seed, cfg.schedule.situations, cfg.scenario.ranges);

    SweepContext ctx{cfg.scenario, cfg.schedule, cfg.master_seed};
    const auto agent = make_agent(cfg.agent, cfg.synthetic);
    CheckpointStore checkpoint((out_dir / "state" / "checkpoint.jsonl").string());

    log << "sweep: " << segments.size() << " segments x " << (cells.size() + 1)
        << " situations x " << cfg.schedule.calls_per_cell() << " calls\n";
    const SweepResults results =
        run_sweep(ctx, segments, cells, draws, *agent, cfg.concurrency, &checkpoint);

    // estimates and effects
    std::map<std::string, OffsettingEstimate> baseline;
    std::map<std::string, std::map<int, OffsettingEstimate>> per_cell;
    long long invalid = 0, total_calls = 0;
    for (const auto& [key, tally] : results.baseline) {
        baseline[key] = offsetting_probability(tally, ProbabilityMode::Pairwise);
        invalid += tally.n_invalid;
        total_calls += tally.total();
    }
    for (const auto& [key, cell_map] : results.per_cell)
        for (const auto& [idx, tally] : cell_map) {
            per_cell[key][idx] = offsetting_probability(tally, ProbabilityMode::Decoy);
            invalid += tally.n_invalid;
            total_calls += tally.total();
        }

    const EffectsResult effects = cell_effects(baseline, per_cell, cells);

    std::map<Country, CellSelection> selections;
    for (const auto& [country, country_effects] : effects.per_country)
        selections[country] = select_country_cells(country_effects, cells.size());

    // per-segment delta under the country's best cell drives the groups
    std::map<std::string, double> country_optimal_delta;
    for (const auto& [key, segment_effects] : effects.per_segment) {
        const Country country = segment_from_key(key).country;
        const DecoyCell& top = selections.at(country).optimal.front();
        const auto it = std::find_if(
            segment_effects.begin(), segment_effects.end(),
            [&](const CellEffect& e) { return e.cell.index == top.index; });
        if (it == segment_effects.end())
            throw DataError("internal: top cell missing from segment effects");
        country_optimal_delta[key] = it->delta;
    }
    const auto groups = predicted_groups(baseline, country_optimal_delta);
    const SegmentOptimalResult segment_optimal =
        select_segment_optimal(effects.per_segment, cfg.analysis.segment_top_k);

    // ---------------------------------------------------------------- artifacts
    std::vector<std::string> artifacts;
    auto artifact = [&](const std::string& name) {
        artifacts.push_back(name);
        return (out_dir / name).string();
    };

    write_segments_csv(artifact("segments.csv"), segments);
    write_grid_csv(artifact("grid.csv"), cells);

    {
        csv::Writer w(artifact("sweep.csv"));
        w.row({"segment_key", "cell_id", "mode", "n_target", "n_competitor", "n_decoy",
               "n_invalid", "probability", "delta"});
        for (const auto& [key, tally] : results.baseline)
            w.row({key, "baseline", "pairwise", format_int(tally.n_target),
                   format_int(tally.n_competitor), format_int(tally.n_decoy),
                   format_int(tally.n_invalid), format_double(baseline.at(key).probability),
                   ""});
        for (const auto& [key, cell_map] : results.per_cell) {
            const auto& segment_effects = effects.per_segment.at(key);
            for (const auto& [idx, tally] : cell_map)
                w.row({key, cells[static_cast<std::size_t>(idx)].id(), "decoy",
                       format_int(tally.n_target), format_int(tally.n_competitor),
                       format_int(tally.n_decoy), format_int(tally.n_invalid),
                       format_double(per_cell.at(key).at(idx).probability),
                       format_double(segment_effects[static_cast<std::size_t>(idx)].delta)});
        }
    }

    {
        csv::Writer w(artifact("country_effects.csv"));
        w.row({"country", "cell_id", "mu", "offset_fraction", "delta"});
        for (const auto& [country, country_effects] : effects.per_country)
            for (const auto& e : country_effects)
                w.row({country_code(country), e.cell.id(), format_double(e.cell.mu),
                       format_double(e.cell.offset_fraction), format_double(e.delta)});
    }

    {
        csv::Writer w(artifact("country_cells.csv"));
        w.row({"country", "kind", "rank", "cell_id", "mu", "offset_fraction", "delta"});
        for (const auto& [country, sel] : selections) {
            const auto& country_effects = effects.per_country.at(country);
            auto delta_of = [&](const DecoyCell& cell) {
                for (const auto& e : country_effects)
                    if (e.cell.index == cell.index) return e.delta;
                return 0.0;
            };
            for (std::size_t i = 0; i < sel.optimal.size(); ++i)
                w.row({country_code(country), "optimal", format_int(static_cast<long long>(i + 1)),
                       sel.optimal[i].id(), format_double(sel.optimal[i].mu),
                       format_double(sel.optimal[i].offset_fraction),
                       format_double(delta_of(sel.optimal[i]))});
            for (std::size_t i = 0; i < sel.non_optimal.size(); ++i)
                w.row({country_code(country), "non_optimal",
                       format_int(static_cast<long long>(i + 1)), sel.non_optimal[i].id(),
                       format_double(sel.non_optimal[i].mu),
                       format_double(sel.non_optimal[i].offset_fraction),
                       format_double(delta_of(sel.non_optimal[i]))});
        }
    }

    for (const auto& [country, country_effects] : effects.per_country) {
        std::map<int, double> delta_by_index;
        for (const auto& e : country_effects) delta_by_index[e.cell.index] = e.delta;
        write_heatmap_csv(
            artifact(std::string("heatmap_delta_") + country_code(country) + ".csv"), cells,
            [&](const DecoyCell& c) { return format_double(delta_by_index.at(c.index)); });
    }

    {
        csv::Writer w(artifact("segment_optimal.csv"));
        w.row({"segment_key", "rank", "cell_id", "delta"});
        for (const auto& [key, top_cells] : segment_optimal.per_segment) {
            const auto& segment_effects = effects.per_segment.at(key);
            for (std::size_t i = 0; i < top_cells.size(); ++i) {
                double delta = 0.0;
                for (const auto& e : segment_effects)
                    if (e.cell.index == top_cells[i].index) delta = e.delta;
                w.row({key, format_int(static_cast<long long>(i + 1)), top_cells[i].id(),
                       format_double(delta)});
            }
        }
    }

    {
        // per-country and pooled counts of "cell is among a segment's optimal"
        std::map<Country, std::map<int, int>> counts_by_country;
        for (const auto& [key, top_cells] : segment_optimal.per_segment) {
            const Country country = segment_from_key(key).country;
            for (const auto& cell : top_cells) ++counts_by_country[country][cell.index];
        }
        csv::Writer w(artifact("segment_counts.csv"));
        w.row({"country", "cell_id", "mu", "offset_fraction", "count"});
        for (const auto& [country, counts] : counts_by_country)
            for (const auto& c : cells) {
                const auto it = counts.find(c.index);
                w.row({country_code(country), c.id(), format_double(c.mu),
                       format_double(c.offset_fraction),
                       format_int(it == counts.end() ? 0 : it->second)});
            }
        for (const auto& c : cells) {
            const auto it = segment_optimal.cell_counts.find(c.index);
            w.row({"all", c.id(), format_double(c.mu), format_double(c.offset_fraction),
                   format_int(it == segment_optimal.cell_counts.end() ? 0 : it->second)});
        }
        for (const auto& [country, counts] : counts_by_country)
            write_heatmap_csv(
                artifact(std::string("heatmap_counts_") + country_code(country) + ".csv"), cells,
                [&, counts_ptr = &counts](const DecoyCell& c) {
                    const auto it = counts_ptr->find(c.index);
                    return format_int(it == counts_ptr->end() ? 0 : it->second);
                });
    }

    write_groups_csv(artifact("predicted_groups.csv"), groups);

    {
        json manifest{
            {"config_hash", cfg.config_hash},
            {"master_seed", cfg.master_seed},
            {"schedule",
             {{"situations", cfg.schedule.situations},
              {"orders_per_situation", cfg.schedule.orders_per_situation},
              {"repetitions", cfg.schedule.repetitions},
              {"calls_per_cell", cfg.schedule.calls_per_cell()}}},
            {"segments", segments.size()},
            {"cells", cells.size()},
            {"agent_calls", total_calls},
            {"invalid_responses", invalid},
            {"invalid_rate",
             total_calls > 0 ? static_cast<double>(invalid) / static_cast<double>(total_calls)
                             : 0.0},
            {"artifacts", artifacts}};
        write_text((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
    }

    log << "sweep complete: " << total_calls << " agent calls, invalid rate "
        << format_double(total_calls > 0
                             ? static_cast<double>(invalid) / static_cast<double>(total_calls)
                             : 0.0,
                         6)
        << "\n";
    log << "artifacts in " << out_dir.string() << "\n";
}

void command_analyze(const RunConfig& cfg, std::ostream& log) {
    if (cfg.paths.respondents_csv.empty())
        throw ConfigError("analyze requires paths.respondents_csv");
    if (!fs::exists(cfg.paths.respondents_csv))
        throw ConfigError("respondent file not found: " + cfg.paths.respondents_csv);
    if (!fs::exists(cfg.paths.groups_csv))
        throw ConfigError("predicted-groups file not found: " + cfg.paths.groups_csv +
                          " (run simulate first or point paths.groups_csv at one)");
    const fs::path out_dir(cfg.paths.output_dir);
    fs::create_directories(out_dir);

    const LoadResult loaded = load_respondents(cfg.paths.respondents_csv);
    for (const auto& e : loaded.report.errors) log << "ingest: " << e << "\n";
    std::vector<std::string> dropped;
    const std::vector<RespondentRecord> records = complete_records(loaded.respondents, &dropped);
    for (const auto& d : dropped) log << "ingest: " << d << "\n";
    if (records.empty())
        throw DataError("no complete respondents in " + cfg.paths.respondents_csv);
    const GroupMap groups = read_groups_csv(cfg.paths.groups_csv);

    const ExclusionSummary exclusions = exclusion_summary(records);
    log << "respondents: " << exclusions.total << " loaded, " << exclusions.passed
        << " passed attention checks\n";
    for (const auto& warning : group_size_warnings(records, groups))
        log << "warning: " << warning << "\n";

    const auto battery = run_battery(records, groups);
    const auto exploratory = run_exploratory(records, groups,
                                             cfg.analysis.n_permutations, cfg.master_seed);

    write_text((out_dir / "hypotheses.json").string(), hypothesis_reports_to_json(battery));
    write_text((out_dir / "exploratory.json").string(),
               exploratory_reports_to_json(exploratory));
    write_text((out_dir / "summary.md").string(), reports_to_markdown(battery, exploratory));

    {
        csv::Writer w((out_dir / "exclusions.csv").string());
        w.row({"respondent_id"});
        for (const auto& id : exclusions.excluded_ids) w.row({id});
    }

    {
        // per-condition mean RST with percentile bootstrap intervals
        const auto passing = passing_respondents(records);
        csv::Writer w((out_dir / "condition_means.csv").string());
        w.row({"condition", "n", "mean_rst", "ci_lower", "ci_upper"});
        int condition_index = 0;
        for (StudyCondition c : kStudyConditions) {
            std::vector<double> values;
            for (const auto& r : passing) values.push_back(compute_rst(r, c).value);
            const auto ci = stats::bootstrap_ci(
                values, seed_mix(cfg.master_seed, 0xC1 + static_cast<std::uint64_t>(condition_index)),
                cfg.analysis.bootstrap_samples, cfg.analysis.bootstrap_level);
            w.row({condition_name(c), format_int(static_cast<long long>(values.size())),
                   format_double(stats::mean_of(values)), format_double(ci.lower),
                   format_double(ci.upper)});
            ++condition_index;
        }
    }

    for (const auto& rep : exploratory) {
        if (rep.id == "H1.1")
            write_group_test_csv((out_dir / "h1_1_by_country.csv").string(), rep.post_hoc);
        if (rep.id == "H2.1")
            write_group_test_csv((out_dir / "h2_1_by_country.csv").string(), rep.post_hoc);
        if (rep.id == "H3.1")
            write_paired_test_csv((out_dir / "h3_1_posthoc.csv").string(), rep.post_hoc);
        if (rep.id == "H4.1")
            write_paired_test_csv((out_dir / "h4_1_posthoc.csv").string(), rep.post_hoc);
        if (rep.id == "sceptics")
            write_paired_test_csv((out_dir / "sceptics_by_country.csv").string(), rep.post_hoc);
    }

    for (const auto& rep : battery) log << rep.id << ": " << rep.decision << "\n";
    log << "reports in " << out_dir.string() << "\n";
}

void command_impact(const RunConfig& cfg, std::ostream& log) {
    if (cfg.impact_inputs.empty()) throw ConfigError("impact inputs are empty");
    const fs::path out_dir(cfg.paths.output_dir);
    fs::create_directories(out_dir);
    const ImpactTable table = compute_impact(cfg.impact_inputs);
    write_impact_csv((out_dir / "impact.csv").string(), table);
    for (const auto& row : table.rows)
        log << country_code(row.country) << ": total " << format_double(row.total_mt, 4)
            << " Mt, sceptics " << format_double(row.sceptic_mt, 4) << " Mt, reduction "
            << format_double(row.reduction_mt, 4) << " Mt\n";
    log << "total reduction: " << format_double(table.reduction_total_mt, 4) << " Mt/yr\n";
}

void command_export_grid(const RunConfig& cfg, std::ostream& log) {
    const fs::path out_dir(cfg.paths.output_dir);
    fs::create_directories(out_dir);
    write_segments_csv((out_dir / "segments.csv").string(), configured_segments(cfg));
    write_grid_csv((out_dir / "grid.csv").string(), configured_cells(cfg));
    log << "wrote segments.csv and grid.csv to " << out_dir.string() << "\n";
}

void command_validate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate(/*for_simulate=*/false);
    log << "configuration ok: " << configured_segments(cfg).size() << " segments, "
        << configured_cells(cfg).size() << " decoy cells, schedule "
        << cfg.schedule.situations << "x" << cfg.schedule.orders_per_situation << "x"
        << cfg.schedule.repetitions << " (" << cfg.schedule.calls_per_cell()
        << " calls per choice situation), config hash " << cfg.config_hash << "\n";
}

}  // namespace offsetsim
