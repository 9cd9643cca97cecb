#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "offsetsim/agents.hpp"
#include "offsetsim/segments.hpp"
#include "offsetsim/stats/anova.hpp"
#include "offsetsim/stats/rank_tests.hpp"
#include "offsetsim/sweep.hpp"

namespace offsetsim {

enum class StudyCondition : std::uint8_t {
    NoDecoy,
    CountryOptimal,
    CountryNonOptimal,
    CountryUniversal,
    Personalized
};

inline constexpr StudyCondition kStudyConditions[] = {
    StudyCondition::NoDecoy, StudyCondition::CountryOptimal, StudyCondition::CountryNonOptimal,
    StudyCondition::CountryUniversal, StudyCondition::Personalized};

const char* condition_name(StudyCondition c);
StudyCondition condition_from_name(const std::string& name);

// Preregistered significance levels, surfaced verbatim in every report.
struct Thresholds {
    double h1 = 0.05;
    double h2 = 0.05;
    double h3_h4_omnibus = 0.05;
    double h3_h4_posthoc = 0.016;          // confirmatory pairwise contrasts
    double per_country_group = 0.01;       // H1.1 / H2.1 and the sceptics cohort
    double per_country_posthoc = 0.005;    // H3.1 / H4.1 pairwise contrasts
};

std::string threshold_note(const Thresholds& t);

struct RespondentRecord {
    std::string id;
    Segment segment;
    std::map<StudyCondition, std::vector<Choice>> choices;  // per-scenario semantic choices
    std::vector<bool> control_dominant;                     // attention-check picks
};

struct ValidationReport {
    std::size_t rows_read = 0;
    std::size_t respondents_loaded = 0;
    std::vector<std::string> errors;  // row- and respondent-level diagnostics
};

struct LoadResult {
    std::vector<RespondentRecord> respondents;
    ValidationReport report;
};

// Documented CSV schema (one row per respondent-scenario):
//   respondent_id,country,gender,age_group,income_group,trust,concern,
//   condition,scenario_index,choice
// with level tokens matching Segment::key() fields, condition one of the five
// study conditions or "attention_check", and choice target/competitor/decoy
// (dominant/dominated for attention rows). Missing columns throw; malformed
// rows are rejected with diagnostics. Records may be partial; completeness is
// checked where an analysis needs it.
LoadResult load_respondents(const std::string& csv_path);

// Records carrying all five conditions and three attention rows; everything
// else lands in `dropped` diagnostics. The battery runs on complete records.
std::vector<RespondentRecord> complete_records(const std::vector<RespondentRecord>& records,
                                               std::vector<std::string>* dropped = nullptr);

// fail = any control scenario chose a dominated option; throws when the
// record does not carry all three control picks.
bool apply_attention_checks(const RespondentRecord& record);

struct ExclusionSummary {
    std::size_t total = 0;
    std::size_t passed = 0;
    std::vector<std::string> excluded_ids;
};

ExclusionSummary exclusion_summary(const std::vector<RespondentRecord>& records);
std::vector<RespondentRecord> passing_respondents(const std::vector<RespondentRecord>& records);

struct RstValue {
    double value = 0.0;
    long long n_target = 0;
    long long n_competitor = 0;
};

// target share among target+competitor picks; 0 when only decoys were chosen.
RstValue compute_rst(const RespondentRecord& record, StudyCondition condition);

// ---------------------------------------------------------------------------
// hypothesis battery
// ---------------------------------------------------------------------------

struct PairwiseEntry {
    std::string label;
    stats::TestResult result;
    double threshold = 0.05;
    bool significant = false;
};

struct HypothesisReport {
    std::string id;  // "H1".."H4"
    std::string description;
    std::optional<stats::TestResult> omnibus;  // Friedman, when the design is within-subject
    double omnibus_threshold = 0.05;
    std::vector<PairwiseEntry> pairwise;
    std::string decision;  // confirmed | rejected | not_significant
    std::string threshold_note;
};

using GroupMap = std::map<std::string, PredictedGroups>;  // segment key -> groups

// Group files produced by the simulation sweep (segment_key,offset_group,decoy_group).
GroupMap read_groups_csv(const std::string& path);
void write_groups_csv(const std::string& path, const GroupMap& groups);

// H1, H2 between predicted groups; H3, H4 within the predicted-increase
// cohort with Friedman omnibus and Wilcoxon post-hocs. Attention-check
// failures are excluded before any test sees the data.
std::vector<HypothesisReport> run_battery(const std::vector<RespondentRecord>& records,
                                          const GroupMap& groups,
                                          const Thresholds& thresholds = {});

// ---------------------------------------------------------------------------
// exploratory analyses
// ---------------------------------------------------------------------------

struct CountryTestRow {
    Country country = Country::SG;
    std::string label;
    stats::TestResult result;
    double threshold = 0.01;
    bool significant = false;
};

struct ExploratoryReport {
    std::string id;  // "H1.1", "H2.1", "H3.1", "H4.1", "sceptics"
    std::string description;
    std::optional<stats::AnovaTable> anova;
    std::vector<CountryTestRow> post_hoc;
    std::optional<PairwiseEntry> pooled;
    std::string threshold_note;
};

std::vector<ExploratoryReport> run_exploratory(const std::vector<RespondentRecord>& records,
                                               const GroupMap& groups, int n_permutations,
                                               std::uint64_t seed,
                                               const Thresholds& thresholds = {});

// Cross-check of predicted-group sizes against the published survey counts;
// only fires when the per-country respondent totals match that study.
std::vector<std::string> group_size_warnings(const std::vector<RespondentRecord>& records,
                                             const GroupMap& groups);

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

std::string hypothesis_reports_to_json(const std::vector<HypothesisReport>& reports);
std::string exploratory_reports_to_json(const std::vector<ExploratoryReport>& reports);

// country, n1, n2, U, p, z, r, significant  (group-comparison layout)
void write_group_test_csv(const std::string& path, const std::vector<CountryTestRow>& rows);
// country, test_type, n, W, z, r, p, significant  (paired-contrast layout)
void write_paired_test_csv(const std::string& path, const std::vector<CountryTestRow>& rows);
// consolidated human-readable summary
std::string reports_to_markdown(const std::vector<HypothesisReport>& battery,
                                const std::vector<ExploratoryReport>& exploratory);

}  // namespace offsetsim
