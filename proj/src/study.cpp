#include "offsetsim/study.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "offsetsim/csv.hpp"
#include "offsetsim/errors.hpp"
#include "offsetsim/format.hpp"

namespace offsetsim {

using nlohmann::json;

const char* condition_name(StudyCondition c) {
    switch (c) {
        case StudyCondition::NoDecoy: return "no_decoy";
        case StudyCondition::CountryOptimal: return "country_optimal";
        case StudyCondition::CountryNonOptimal: return "country_non_optimal";
        case StudyCondition::CountryUniversal: return "country_universal";
        case StudyCondition::Personalized: return "personalized";
    }
    return "?";
}

StudyCondition condition_from_name(const std::string& name) {
    for (StudyCondition c : kStudyConditions)
        if (name == condition_name(c)) return c;
    throw DataError("unknown condition: " + name);
}

std::string threshold_note(const Thresholds& t) {
    std::ostringstream os;
    os << "significance thresholds: H1/H2 " << t.h1 << "; H3/H4 omnibus " << t.h3_h4_omnibus
       << ", post-hoc " << t.h3_h4_posthoc << " (Bonferroni); per-country group contrasts and "
          "sceptics cohort "
       << t.per_country_group << "; per-country condition post-hocs " << t.per_country_posthoc;
    return os.str();
}

// ---------------------------------------------------------------------------
// ingestion
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kColumns[] = {"respondent_id", "country",  "gender",
                                    "age_group",     "income_group", "trust",
                                    "concern",       "condition", "scenario_index", "choice"};

struct RowView {
    std::string respondent_id, country, gender, age_group, income_group, trust, concern,
        condition, scenario_index, choice;
};

Segment parse_segment_fields(const RowView& r) {
    Segment s{};
    s.country = country_from_code(r.country);
    if (r.gender == "man")
        s.gender = Gender::Man;
    else if (r.gender == "woman")
        s.gender = Gender::Woman;
    else
        throw DataError("bad gender '" + r.gender + "'");
    if (r.age_group == "age_lo")
        s.age = AgeBand::BelowMedian;
    else if (r.age_group == "age_hi")
        s.age = AgeBand::AboveMedian;
    else
        throw DataError("bad age_group '" + r.age_group + "'");
    if (r.income_group == "inc_lo")
        s.income = IncomeBand::BelowMedian;
    else if (r.income_group == "inc_hi")
        s.income = IncomeBand::AboveMedian;
    else
        throw DataError("bad income_group '" + r.income_group + "'");
    if (r.trust == "trust")
        s.trust = Trust::Trusts;
    else if (r.trust == "no_trust")
        s.trust = Trust::NotTrusts;
    else
        throw DataError("bad trust '" + r.trust + "'");
    if (r.concern == "concern")
        s.concern = Concern::Concerned;
    else if (r.concern == "no_concern")
        s.concern = Concern::NotConcerned;
    else
        throw DataError("bad concern '" + r.concern + "'");
    return s;
}

Choice parse_choice_token(const std::string& token) {
    if (token == "target") return Choice::Target;
    if (token == "competitor") return Choice::Competitor;
    if (token == "decoy") return Choice::Decoy;
    throw DataError("bad choice '" + token + "'");
}

struct RespondentBuilder {
    Segment segment;
    bool has_segment = false;
    std::map<StudyCondition, std::map<int, Choice>> scenario_choices;
    std::map<int, bool> controls;  // scenario index -> chose dominant
    bool broken = false;
};

}  // namespace

LoadResult load_respondents(const std::string& csv_path) {
    const csv::Table table = csv::read_file(csv_path);

    std::vector<std::string> missing;
    std::map<std::string, int> col;
    for (const char* name : kColumns) {
        const int idx = table.column(name);
        if (idx < 0)
            missing.push_back(name);
        else
            col[name] = idx;
    }
    if (!missing.empty()) {
        std::string msg = "respondent file is missing columns:";
        for (const auto& m : missing) msg += " " + m;
        throw DataError(msg);
    }

    LoadResult out;
    out.report.rows_read = table.rows.size();
    std::map<std::string, RespondentBuilder> builders;
    std::vector<std::string> order;  // first-seen respondent order

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "row " + std::to_string(i + 2);  // 1-based + header
        if (row.size() != std::size(kColumns)) {
            out.report.errors.push_back(where + ": expected " +
                                        std::to_string(std::size(kColumns)) + " fields, got " +
                                        std::to_string(row.size()));
            continue;
        }
        RowView v{row[col["respondent_id"]], row[col["country"]],     row[col["gender"]],
                  row[col["age_group"]],     row[col["income_group"]], row[col["trust"]],
                  row[col["concern"]],       row[col["condition"]],   row[col["scenario_index"]],
                  row[col["choice"]]};
        try {
            if (v.respondent_id.empty()) throw DataError("empty respondent_id");
            const Segment seg = parse_segment_fields(v);
            int scenario = -1;
            try {
                scenario = std::stoi(v.scenario_index);
            } catch (...) {
                throw DataError("bad scenario_index '" + v.scenario_index + "'");
            }

            auto& b = builders[v.respondent_id];
            if (!b.has_segment) {
                b.segment = seg;
                b.has_segment = true;
                order.push_back(v.respondent_id);
            } else if (!(b.segment == seg)) {
                b.broken = true;
                throw DataError("segment fields differ across rows of respondent " +
                                v.respondent_id);
            }

            if (v.condition == "attention_check") {
                if (v.choice != "dominant" && v.choice != "dominated")
                    throw DataError("attention rows need choice dominant/dominated, got '" +
                                    v.choice + "'");
                if (!b.controls.emplace(scenario, v.choice == "dominant").second)
                    throw DataError("duplicate attention scenario " + std::to_string(scenario) +
                                    " for respondent " + v.respondent_id);
            } else {
                const StudyCondition cond = condition_from_name(v.condition);
                const Choice choice = parse_choice_token(v.choice);
                if (cond == StudyCondition::NoDecoy && choice == Choice::Decoy)
                    throw DataError("decoy choice under no_decoy condition (respondent " +
                                    v.respondent_id + ")");
                if (!b.scenario_choices[cond].emplace(scenario, choice).second)
                    throw DataError("duplicate scenario " + std::to_string(scenario) +
                                    " in condition " + v.condition + " for respondent " +
                                    v.respondent_id);
            }
        } catch (const DataError& e) {
            out.report.errors.push_back(where + ": " + e.what());
        }
    }

    for (const std::string& id : order) {
        const RespondentBuilder& b = builders[id];
        if (b.broken) {
            out.report.errors.push_back("respondent " + id + ": dropped (inconsistent rows)");
            continue;
        }
        RespondentRecord rec;
        rec.id = id;
        rec.segment = b.segment;
        for (const auto& [cond, by_scenario] : b.scenario_choices) {
            auto& list = rec.choices[cond];
            for (const auto& [idx, choice] : by_scenario) list.push_back(choice);
        }
        for (const auto& [idx, dominant] : b.controls) rec.control_dominant.push_back(dominant);
        out.respondents.push_back(std::move(rec));
    }
    out.report.respondents_loaded = out.respondents.size();
    return out;
}

std::vector<RespondentRecord> complete_records(const std::vector<RespondentRecord>& records,
                                               std::vector<std::string>* dropped) {
    std::vector<RespondentRecord> out;
    for (const auto& r : records) {
        std::vector<std::string> problems;
        for (StudyCondition c : kStudyConditions)
            if (!r.choices.contains(c) || r.choices.at(c).empty())
                problems.push_back(std::string("no scenarios for ") + condition_name(c));
        if (r.control_dominant.size() != 3)
            problems.push_back("expected 3 attention rows, got " +
                               std::to_string(r.control_dominant.size()));
        if (problems.empty()) {
            out.push_back(r);
        } else if (dropped) {
            std::string msg = "respondent " + r.id + ": incomplete (";
            for (std::size_t i = 0; i < problems.size(); ++i)
                msg += (i ? "; " : "") + problems[i];
            dropped->push_back(msg + ")");
        }
    }
    return out;
}

bool apply_attention_checks(const RespondentRecord& record) {
    if (record.control_dominant.size() != 3)
        throw DataError("respondent " + record.id + ": expected 3 control scenarios, got " +
                        std::to_string(record.control_dominant.size()));
    return std::all_of(record.control_dominant.begin(), record.control_dominant.end(),
                       [](bool dominant) { return dominant; });
}

ExclusionSummary exclusion_summary(const std::vector<RespondentRecord>& records) {
    ExclusionSummary s;
    s.total = records.size();
    for (const auto& r : records) {
        if (apply_attention_checks(r))
            ++s.passed;
        else
            s.excluded_ids.push_back(r.id);
    }
    return s;
}

std::vector<RespondentRecord> passing_respondents(const std::vector<RespondentRecord>& records) {
    std::vector<RespondentRecord> out;
    for (const auto& r : records)
        if (apply_attention_checks(r)) out.push_back(r);
    return out;
}

RstValue compute_rst(const RespondentRecord& record, StudyCondition condition) {
    const auto it = record.choices.find(condition);
    if (it == record.choices.end())
        throw DataError("respondent " + record.id + " has no scenarios for condition " +
                        condition_name(condition));
    RstValue rst;
    for (Choice c : it->second) {
        if (c == Choice::Target) ++rst.n_target;
        if (c == Choice::Competitor) ++rst.n_competitor;
    }
    const long long denom = rst.n_target + rst.n_competitor;
    rst.value = denom > 0 ? static_cast<double>(rst.n_target) / static_cast<double>(denom) : 0.0;
    return rst;
}

// ---------------------------------------------------------------------------
// hypothesis battery
// ---------------------------------------------------------------------------

namespace {

const PredictedGroups& groups_for(const GroupMap& groups, const Segment& segment) {
    const auto it = groups.find(segment.key());
    if (it == groups.end())
        throw DataError("no predicted groups for segment " + segment.key());
    return it->second;
}

std::string directional_decision(const stats::TestResult& key_result, double threshold,
                                 bool predicted_positive) {
    if (key_result.p_two_sided >= threshold) return "not_significant";
    const bool positive = key_result.mean_diff > 0.0;
    return positive == predicted_positive ? "confirmed" : "rejected";
}

PairwiseEntry make_pairwise(std::string label, stats::TestResult result, double threshold) {
    PairwiseEntry e;
    e.label = std::move(label);
    e.result = std::move(result);
    e.threshold = threshold;
    e.significant = e.result.p_two_sided < threshold;
    return e;
}

}  // namespace

std::vector<HypothesisReport> run_battery(const std::vector<RespondentRecord>& records,
                                          const GroupMap& groups, const Thresholds& th) {
    const std::vector<RespondentRecord> passing = passing_respondents(records);
    const std::string note = threshold_note(th);
    std::vector<HypothesisReport> reports;

    // H1: no-decoy RST, predicted-full-offset group vs the rest
    {
        std::vector<double> g1, g2;
        for (const auto& r : passing) {
            const double rst = compute_rst(r, StudyCondition::NoDecoy).value;
            (groups_for(groups, r.segment).offset_group == 1 ? g1 : g2).push_back(rst);
        }
        if (g1.empty() || g2.empty()) throw DataError("H1: empty predicted group");
        HypothesisReport rep;
        rep.id = "H1";
        rep.description =
            "no-decoy offsetting probability: predicted full-offset group vs others";
        rep.pairwise.push_back(
            make_pairwise("predicted-offset vs predicted-no-offset",
                          stats::mann_whitney(g1, g2), th.h1));
        rep.decision = directional_decision(rep.pairwise[0].result, th.h1, true);
        rep.threshold_note = note;
        reports.push_back(std::move(rep));
    }

    // H2: change under the country-optimal decoy between predicted decoy groups
    {
        std::vector<double> g1, g2;
        for (const auto& r : passing) {
            const double change = compute_rst(r, StudyCondition::CountryOptimal).value -
                                  compute_rst(r, StudyCondition::NoDecoy).value;
            (groups_for(groups, r.segment).decoy_group == 1 ? g1 : g2).push_back(change);
        }
        if (g1.empty() || g2.empty()) throw DataError("H2: empty predicted group");
        HypothesisReport rep;
        rep.id = "H2";
        rep.description = "observed change under country-optimal decoy between predicted "
                          "increase/no-increase groups";
        rep.pairwise.push_back(make_pairwise("predicted-increase vs predicted-no-increase",
                                             stats::mann_whitney(g1, g2), th.h2));
        rep.decision = directional_decision(rep.pairwise[0].result, th.h2, true);
        rep.threshold_note = note;
        reports.push_back(std::move(rep));
    }

    // shared cohort for H3/H4: respondents predicted to respond to the decoy
    std::vector<const RespondentRecord*> cohort;
    for (const auto& r : passing)
        if (groups_for(groups, r.segment).decoy_group == 1) cohort.push_back(&r);

    auto within_subject = [&](const std::string& id, const std::string& description,
                              StudyCondition focal, StudyCondition reference_a,
                              StudyCondition reference_b, const std::string& label_a,
                              const std::string& label_b, bool need_both) {
        if (cohort.empty()) throw DataError(id + ": empty predicted-increase cohort");
        std::vector<std::vector<double>> matrix;
        std::vector<double> focal_rst, ref_a, ref_b;
        for (const auto* r : cohort) {
            const double f = compute_rst(*r, focal).value;
            const double a = compute_rst(*r, reference_a).value;
            const double b = compute_rst(*r, reference_b).value;
            matrix.push_back({f, a, b});
            focal_rst.push_back(f);
            ref_a.push_back(a);
            ref_b.push_back(b);
        }
        HypothesisReport rep;
        rep.id = id;
        rep.description = description;
        rep.omnibus = stats::friedman(matrix);
        rep.omnibus_threshold = th.h3_h4_omnibus;
        rep.threshold_note = threshold_note(th);
        if (rep.omnibus->p_two_sided >= th.h3_h4_omnibus) {
            rep.decision = "not_significant";  // omnibus failed: no post-hocs run
            return rep;
        }
        rep.pairwise.push_back(make_pairwise(
            label_a, stats::wilcoxon_signed_rank(focal_rst, ref_a), th.h3_h4_posthoc));
        rep.pairwise.push_back(make_pairwise(
            label_b, stats::wilcoxon_signed_rank(focal_rst, ref_b), th.h3_h4_posthoc));

        const auto& key_b = rep.pairwise[1].result;
        if (need_both) {
            const auto& key_a = rep.pairwise[0].result;
            const bool both_sig = rep.pairwise[0].significant && rep.pairwise[1].significant;
            const bool both_pos = key_a.mean_diff > 0.0 && key_b.mean_diff > 0.0;
            if (both_sig && both_pos)
                rep.decision = "confirmed";
            else if ((rep.pairwise[0].significant && key_a.mean_diff < 0.0) ||
                     (rep.pairwise[1].significant && key_b.mean_diff < 0.0))
                rep.decision = "rejected";
            else
                rep.decision = "not_significant";
        } else {
            rep.decision =
                directional_decision(key_b, th.h3_h4_posthoc, /*predicted_positive=*/true);
        }
        return rep;
    };

    // H3: the optimal-vs-non-optimal contrast carries the hypothesis
    reports.push_back(within_subject(
        "H3", "country-optimal decoy against no-decoy and country-non-optimal decoy",
        StudyCondition::CountryOptimal, StudyCondition::NoDecoy,
        StudyCondition::CountryNonOptimal, "country-optimal vs no-decoy",
        "country-optimal vs country-non-optimal", /*need_both=*/false));

    // H4: personalized must beat both references
    reports.push_back(within_subject(
        "H4", "personalized decoy against no-decoy and country-optimal decoy",
        StudyCondition::Personalized, StudyCondition::NoDecoy, StudyCondition::CountryOptimal,
        "segment-optimal vs no-decoy", "segment-optimal vs country-optimal",
        /*need_both=*/true));

    return reports;
}

// ---------------------------------------------------------------------------
// exploratory analyses
// ---------------------------------------------------------------------------

std::vector<ExploratoryReport> run_exploratory(const std::vector<RespondentRecord>& records,
                                               const GroupMap& groups, int n_permutations,
                                               std::uint64_t seed, const Thresholds& th) {
    const std::vector<RespondentRecord> passing = passing_respondents(records);
    const std::string note = threshold_note(th);
    std::vector<ExploratoryReport> reports;

    // group-by-country interaction on a per-respondent value
    auto group_by_country = [&](const std::string& id, const std::string& description,
                                auto&& value_of, auto&& group_of, std::uint64_t salt) {
        std::vector<double> values;
        std::vector<std::string> group_labels, country_labels;
        for (const auto& r : passing) {
            values.push_back(value_of(r));
            group_labels.push_back(group_of(r) == 1 ? "group1" : "group2");
            country_labels.push_back(country_code(r.segment.country));
        }
        ExploratoryReport rep;
        rep.id = id;
        rep.description = description;
        rep.threshold_note = note;
        rep.anova = stats::two_way_anova_with_permutation(values, group_labels, country_labels,
                                                          n_permutations, seed + salt, "group",
                                                          "country");
        for (Country c : kCountries) {
            std::vector<double> g1, g2;
            for (const auto& r : passing) {
                if (r.segment.country != c) continue;
                (group_of(r) == 1 ? g1 : g2).push_back(value_of(r));
            }
            if (g1.empty() || g2.empty()) continue;  // country absent from this dataset
            CountryTestRow row;
            row.country = c;
            row.label = "group1 vs group2";
            row.result = stats::mann_whitney(g1, g2);
            row.threshold = th.per_country_group;
            row.significant = row.result.p_two_sided < row.threshold;
            rep.post_hoc.push_back(std::move(row));
        }
        reports.push_back(std::move(rep));
    };

    group_by_country(
        "H1.1", "no-decoy offsetting probability: predicted group x country",
        [](const RespondentRecord& r) { return compute_rst(r, StudyCondition::NoDecoy).value; },
        [&](const RespondentRecord& r) { return groups_for(groups, r.segment).offset_group; },
        0x11);

    group_by_country(
        "H2.1", "change under country-optimal decoy: predicted group x country",
        [](const RespondentRecord& r) {
            return compute_rst(r, StudyCondition::CountryOptimal).value -
                   compute_rst(r, StudyCondition::NoDecoy).value;
        },
        [&](const RespondentRecord& r) { return groups_for(groups, r.segment).decoy_group; },
        0x21);

    // condition-by-country interactions on the predicted-increase cohort
    auto condition_by_country = [&](const std::string& id, const std::string& description,
                                    StudyCondition focal, StudyCondition ref_a,
                                    StudyCondition ref_b, const std::string& label_a,
                                    const std::string& label_b, std::uint64_t salt) {
        std::vector<double> values;
        std::vector<std::string> type_labels, country_labels;
        for (const auto& r : passing) {
            if (groups_for(groups, r.segment).decoy_group != 1) continue;
            for (StudyCondition c : {ref_a, focal, ref_b}) {
                values.push_back(compute_rst(r, c).value);
                type_labels.push_back(condition_name(c));
                country_labels.push_back(country_code(r.segment.country));
            }
        }
        if (values.empty()) throw DataError(id + ": empty predicted-increase cohort");
        ExploratoryReport rep;
        rep.id = id;
        rep.description = description;
        rep.threshold_note = note;
        rep.anova = stats::two_way_anova_with_permutation(
            values, type_labels, country_labels, n_permutations, seed + salt, "decoy_type",
            "country");
        for (Country c : kCountries) {
            std::vector<double> focal_rst, a_rst, b_rst;
            for (const auto& r : passing) {
                if (r.segment.country != c) continue;
                if (groups_for(groups, r.segment).decoy_group != 1) continue;
                focal_rst.push_back(compute_rst(r, focal).value);
                a_rst.push_back(compute_rst(r, ref_a).value);
                b_rst.push_back(compute_rst(r, ref_b).value);
            }
            if (focal_rst.empty()) continue;
            for (const auto& [label, ref] :
                 std::vector<std::pair<std::string, std::vector<double>*>>{{label_a, &a_rst},
                                                                           {label_b, &b_rst}}) {
                CountryTestRow row;
                row.country = c;
                row.label = label;
                row.result = stats::wilcoxon_signed_rank(focal_rst, *ref);
                row.threshold = th.per_country_posthoc;
                row.significant = row.result.p_two_sided < row.threshold;
                rep.post_hoc.push_back(std::move(row));
            }
        }
        reports.push_back(std::move(rep));
    };

    condition_by_country("H3.1",
                         "country-optimal / non-optimal / no-decoy conditions x country",
                         StudyCondition::CountryOptimal, StudyCondition::NoDecoy,
                         StudyCondition::CountryNonOptimal, "country-optimal vs no-decoy",
                         "country-optimal vs country-non-optimal", 0x31);

    condition_by_country("H4.1", "personalized / country-optimal / no-decoy conditions x country",
                         StudyCondition::Personalized, StudyCondition::NoDecoy,
                         StudyCondition::CountryOptimal, "segment-optimal vs no-decoy",
                         "segment-optimal vs country-optimal", 0x41);

    // sceptical travellers: personalized decoy vs no decoy
    {
        std::vector<double> personalized, baseline;
        ExploratoryReport rep;
        rep.id = "sceptics";
        rep.description =
            "travellers who cannot say they believe offset payments are really used";
        rep.threshold_note = note;
        for (Country c : kCountries) {
            std::vector<double> p_c, b_c;
            for (const auto& r : passing) {
                if (r.segment.trust != Trust::NotTrusts || r.segment.country != c) continue;
                p_c.push_back(compute_rst(r, StudyCondition::Personalized).value);
                b_c.push_back(compute_rst(r, StudyCondition::NoDecoy).value);
            }
            personalized.insert(personalized.end(), p_c.begin(), p_c.end());
            baseline.insert(baseline.end(), b_c.begin(), b_c.end());
            if (p_c.empty()) continue;
            CountryTestRow row;
            row.country = c;
            row.label = "segment-optimal vs no-decoy";
            row.result = stats::wilcoxon_signed_rank(p_c, b_c);
            row.threshold = th.per_country_group;
            row.significant = row.result.p_two_sided < row.threshold;
            rep.post_hoc.push_back(std::move(row));
        }
        if (!personalized.empty())
            rep.pooled = make_pairwise("segment-optimal vs no-decoy (pooled)",
                                       stats::wilcoxon_signed_rank(personalized, baseline),
                                       th.per_country_group);
        reports.push_back(std::move(rep));
    }

    return reports;
}

std::vector<std::string> group_size_warnings(const std::vector<RespondentRecord>& records,
                                             const GroupMap& groups) {
    // published totals (passed survey / predicted-increase) per country
    static const std::map<Country, std::pair<int, int>> published = {
        {Country::IN, {714, 321}}, {Country::CN, {713, 167}}, {Country::DE, {638, 221}},
        {Country::SG, {694, 231}}, {Country::US, {736, 345}},
    };
    std::map<Country, int> totals, group1;
    for (const auto& r : passing_respondents(records)) {
        ++totals[r.segment.country];
        if (groups_for(groups, r.segment).decoy_group == 1) ++group1[r.segment.country];
    }
    for (const auto& [country, expect] : published)
        if (totals[country] != expect.first) return {};  // not that study's dataset

    std::vector<std::string> warnings;
    for (const auto& [country, expect] : published)
        if (group1[country] != expect.second)
            warnings.push_back(std::string("predicted-increase group size for ") +
                               country_code(country) + " is " +
                               std::to_string(group1[country]) + ", published count is " +
                               std::to_string(expect.second));
    return warnings;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

json test_result_to_json(const stats::TestResult& r) {
    json n = json::array();
    for (std::size_t v : r.n_values) n.push_back(v);
    return json{{"statistic", r.statistic}, {"z", r.z},
                {"p_two_sided", r.p_two_sided}, {"effect_size", r.effect_size},
                {"n_values", n}, {"mean_diff", r.mean_diff}};
}

json pairwise_to_json(const PairwiseEntry& e) {
    return json{{"label", e.label}, {"result", test_result_to_json(e.result)},
                {"threshold", e.threshold}, {"significant", e.significant}};
}

json anova_to_json(const stats::AnovaTable& t) {
    json effects = json::array();
    auto row = [](const stats::AnovaRow& r) {
        return json{{"term", r.term},     {"sum_sq", r.sum_sq},
                    {"df", r.df},         {"f", r.f},
                    {"p_parametric", r.p_parametric}, {"p_permutation", r.p_permutation},
                    {"eta_sq", r.eta_sq}, {"partial_eta_sq", r.partial_eta_sq}};
    };
    for (const auto& e : t.effects) effects.push_back(row(e));
    return json{{"effects", effects}, {"residual", row(t.residual)}, {"ss_total", t.ss_total}};
}

}  // namespace

std::string hypothesis_reports_to_json(const std::vector<HypothesisReport>& reports) {
    json out = json::array();
    for (const auto& rep : reports) {
        json j{{"hypothesis", rep.id},
               {"description", rep.description},
               {"decision", rep.decision},
               {"threshold_note", rep.threshold_note}};
        if (rep.omnibus) {
            j["omnibus"] = test_result_to_json(*rep.omnibus);
            j["omnibus_threshold"] = rep.omnibus_threshold;
        }
        json pw = json::array();
        for (const auto& e : rep.pairwise) pw.push_back(pairwise_to_json(e));
        j["pairwise"] = pw;
        out.push_back(std::move(j));
    }
    return out.dump(2);
}

std::string exploratory_reports_to_json(const std::vector<ExploratoryReport>& reports) {
    json out = json::array();
    for (const auto& rep : reports) {
        json j{{"analysis", rep.id}, {"description", rep.description},
               {"threshold_note", rep.threshold_note}};
        if (rep.anova) j["anova"] = anova_to_json(*rep.anova);
        if (rep.pooled) j["pooled"] = pairwise_to_json(*rep.pooled);
        json rows = json::array();
        for (const auto& row : rep.post_hoc)
            rows.push_back(json{{"country", country_code(row.country)},
                                {"label", row.label},
                                {"result", test_result_to_json(row.result)},
                                {"threshold", row.threshold},
                                {"significant", row.significant}});
        j["post_hoc"] = rows;
        out.push_back(std::move(j));
    }
    return out.dump(2);
}

GroupMap read_groups_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const int key_col = table.column("segment_key");
    const int off_col = table.column("offset_group");
    const int dec_col = table.column("decoy_group");
    if (key_col < 0 || off_col < 0 || dec_col < 0)
        throw DataError("groups file needs columns segment_key, offset_group, decoy_group");
    GroupMap groups;
    for (const auto& row : table.rows) {
        PredictedGroups g;
        g.offset_group = std::stoi(row[static_cast<std::size_t>(off_col)]);
        g.decoy_group = std::stoi(row[static_cast<std::size_t>(dec_col)]);
        if ((g.offset_group != 1 && g.offset_group != 2) ||
            (g.decoy_group != 1 && g.decoy_group != 2))
            throw DataError("groups file: group labels must be 1 or 2");
        segment_from_key(row[static_cast<std::size_t>(key_col)]);  // validate
        groups[row[static_cast<std::size_t>(key_col)]] = g;
    }
    return groups;
}

void write_groups_csv(const std::string& path, const GroupMap& groups) {
    csv::Writer w(path);
    w.row({"segment_key", "offset_group", "decoy_group"});
    for (const auto& [key, g] : groups)
        w.row({key, format_int(g.offset_group), format_int(g.decoy_group)});
}

void write_group_test_csv(const std::string& path, const std::vector<CountryTestRow>& rows) {
    csv::Writer w(path);
    w.row({"country", "n1", "n2", "u_statistic", "p_value", "z_value", "r_effect_size",
           "significant"});
    for (const auto& r : rows)
        w.row({country_code(r.country), format_int(static_cast<long long>(r.result.n_values[0])),
               format_int(static_cast<long long>(r.result.n_values[1])),
               format_double(r.result.statistic), format_double(r.result.p_two_sided),
               format_double(r.result.z), format_double(r.result.effect_size),
               r.significant ? "true" : "false"});
}

void write_paired_test_csv(const std::string& path, const std::vector<CountryTestRow>& rows) {
    csv::Writer w(path);
    w.row({"country", "test_type", "n", "w_statistic", "z_value", "r_effect_size", "p_value",
           "significant"});
    for (const auto& r : rows)
        w.row({country_code(r.country), r.label,
               format_int(static_cast<long long>(r.result.n_values[0])),
               format_double(r.result.statistic), format_double(r.result.z),
               format_double(r.result.effect_size), format_double(r.result.p_two_sided),
               r.significant ? "true" : "false"});
}

std::string reports_to_markdown(const std::vector<HypothesisReport>& battery,
                                const std::vector<ExploratoryReport>& exploratory) {
    std::ostringstream os;
    os << "# Hypothesis battery\n\n";
    if (!battery.empty()) os << "_" << battery.front().threshold_note << "_\n\n";
    for (const auto& rep : battery) {
        os << "## " << rep.id << " — " << rep.description << "\n\n";
        os << "decision: **" << rep.decision << "**\n\n";
        if (rep.omnibus)
            os << "- omnibus: chi2(" << rep.omnibus->n_values[1] - 1 << ") = "
               << format_double(rep.omnibus->statistic, 6)
               << ", p = " << format_double(rep.omnibus->p_two_sided, 4) << ", W = "
               << format_double(rep.omnibus->effect_size, 4) << " (n = "
               << rep.omnibus->n_values[0] << ", alpha = " << rep.omnibus_threshold << ")\n";
        for (const auto& e : rep.pairwise)
            os << "- " << e.label << ": statistic = " << format_double(e.result.statistic, 6)
               << ", z = " << format_double(e.result.z, 4)
               << ", p = " << format_double(e.result.p_two_sided, 4)
               << ", r = " << format_double(e.result.effect_size, 4)
               << (e.significant ? " (significant at " : " (not significant at ")
               << e.threshold << ")\n";
        os << "\n";
    }
    os << "# Exploratory analyses\n\n";
    for (const auto& rep : exploratory) {
        os << "## " << rep.id << " — " << rep.description << "\n\n";
        if (rep.anova) {
            os << "| term | sum_sq | df | F | p | p_perm | eta_sq | partial_eta_sq |\n";
            os << "|---|---|---|---|---|---|---|---|\n";
            for (const auto& e : rep.anova->effects)
                os << "| " << e.term << " | " << format_double(e.sum_sq, 6) << " | " << e.df
                   << " | " << format_double(e.f, 6) << " | " << format_double(e.p_parametric, 4)
                   << " | " << format_double(e.p_permutation, 4) << " | "
                   << format_double(e.eta_sq, 4) << " | " << format_double(e.partial_eta_sq, 4)
                   << " |\n";
            os << "\n";
        }
        if (rep.pooled)
            os << "- pooled: " << rep.pooled->label
               << ": z = " << format_double(rep.pooled->result.z, 4)
               << ", p = " << format_double(rep.pooled->result.p_two_sided, 4)
               << ", r = " << format_double(rep.pooled->result.effect_size, 4) << "\n";
        for (const auto& row : rep.post_hoc)
            os << "- " << country_code(row.country) << " " << row.label
               << ": z = " << format_double(row.result.z, 4)
               << ", p = " << format_double(row.result.p_two_sided, 4)
               << ", r = " << format_double(row.result.effect_size, 4)
               << (row.significant ? " (significant at " : " (not significant at ")
               << row.threshold << ")\n";
        os << "\n";
    }
    return os.str();
}

}  // namespace offsetsim
