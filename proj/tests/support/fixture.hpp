// Deterministic synthetic respondent generator with designed effects:
// predicted groups derive from segment attitudes, and per-condition target
// rates are chosen so the battery's expected outcomes are known up front.
#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "offsetsim/csv.hpp"
#include "offsetsim/rng.hpp"
#include "offsetsim/segments.hpp"
#include "offsetsim/study.hpp"
#include "offsetsim/sweep.hpp"

namespace fixture {

using namespace offsetsim;

struct FixtureSpec {
    int per_country = 60;
    int scenarios_per_condition = 3;
    double attention_fail_rate = 0.08;
    double decoy_pick_rate = 0.10;  // chance of picking the decoy when present

    // target-choice rates: [decoy_group-1][condition]
    // group 1 (predicted to respond): strong lift under good decoys
    // group 2: flat across conditions
    double rate(int decoy_group, StudyCondition c, int offset_group) const {
        const bool responsive = decoy_group == 1;
        double base = 0.0;
        switch (c) {
            case StudyCondition::NoDecoy: base = responsive ? 0.62 : 0.80; break;
            case StudyCondition::CountryOptimal: base = responsive ? 0.88 : 0.80; break;
            case StudyCondition::CountryNonOptimal: base = responsive ? 0.30 : 0.76; break;
            case StudyCondition::CountryUniversal: base = responsive ? 0.70 : 0.78; break;
            case StudyCondition::Personalized: base = responsive ? 0.97 : 0.82; break;
        }
        if (offset_group == 1 && c == StudyCondition::NoDecoy) base = 0.93;
        return base;
    }
};

// groups mirror the attitude structure: trusting+concerned segments offset
// anyway; everyone else is predicted to respond to the decoy
inline GroupMap designed_groups() {
    GroupMap groups;
    for (const Segment& s : enumerate_segments()) {
        PredictedGroups g;
        const bool devoted = s.trust == Trust::Trusts && s.concern == Concern::Concerned;
        g.offset_group = devoted ? 1 : 2;
        g.decoy_group = devoted ? 2 : 1;
        groups[s.key()] = g;
    }
    return groups;
}

struct GeneratedStudy {
    std::vector<std::vector<std::string>> rows;  // csv rows (without header)
    GroupMap groups;
    int n_respondents = 0;
    int n_attention_failures = 0;
};

inline GeneratedStudy generate_study(const FixtureSpec& spec, std::uint64_t seed) {
    GeneratedStudy out;
    out.groups = designed_groups();

    const auto segments = enumerate_segments();
    std::map<Country, std::vector<Segment>> by_country;
    for (const Segment& s : segments) by_country[s.country].push_back(s);

    SplitMix rng(seed);
    int next_id = 1;
    for (const auto& [country, pool] : by_country) {
        for (int i = 0; i < spec.per_country; ++i) {
            const Segment seg = pool[static_cast<std::size_t>(rng.next_below(pool.size()))];
            const PredictedGroups g = out.groups.at(seg.key());
            const std::string id = "r" + std::to_string(next_id++);
            ++out.n_respondents;

            const bool fails_attention = rng.next_double() < spec.attention_fail_rate;
            if (fails_attention) ++out.n_attention_failures;
            const int failing_control = static_cast<int>(rng.next_below(3));

            auto push_row = [&](const std::string& condition, int scenario,
                                const std::string& choice) {
                out.rows.push_back({id, country_code(seg.country),
                                    seg.gender == Gender::Man ? "man" : "woman",
                                    seg.age == AgeBand::BelowMedian ? "age_lo" : "age_hi",
                                    seg.income == IncomeBand::BelowMedian ? "inc_lo" : "inc_hi",
                                    seg.trust == Trust::Trusts ? "trust" : "no_trust",
                                    seg.concern == Concern::Concerned ? "concern" : "no_concern",
                                    condition, std::to_string(scenario), choice});
            };

            for (StudyCondition c : kStudyConditions) {
                const double p_target = spec.rate(g.decoy_group, c, g.offset_group);
                for (int s = 0; s < spec.scenarios_per_condition; ++s) {
                    std::string choice;
                    if (c != StudyCondition::NoDecoy && rng.next_double() < spec.decoy_pick_rate)
                        choice = "decoy";
                    else
                        choice = rng.next_double() < p_target ? "target" : "competitor";
                    push_row(condition_name(c), s, choice);
                }
            }
            for (int s = 0; s < 3; ++s)
                push_row("attention_check", s,
                         fails_attention && s == failing_control ? "dominated" : "dominant");
        }
    }
    return out;
}

inline void write_study_csv(const std::string& path, const GeneratedStudy& study) {
    csv::Writer w(path);
    w.row({"respondent_id", "country", "gender", "age_group", "income_group", "trust", "concern",
           "condition", "scenario_index", "choice"});
    for (const auto& row : study.rows) w.row(row);
}

}  // namespace fixture
