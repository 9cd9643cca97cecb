#include "offsetsim/segments.hpp"

#include <algorithm>

#include "offsetsim/csv.hpp"
#include "offsetsim/errors.hpp"

namespace offsetsim {

const char* country_code(Country c) {
    switch (c) {
        case Country::CN: return "cn";
        case Country::DE: return "de";
        case Country::IN: return "in";
        case Country::SG: return "sg";
        case Country::US: return "us";
    }
    return "??";
}

const char* country_display_name(Country c) {
    switch (c) {
        case Country::CN: return "China";
        case Country::DE: return "Germany";
        case Country::IN: return "India";
        case Country::SG: return "Singapore";
        case Country::US: return "US";
    }
    return "?";
}

Country country_from_code(const std::string& code) {
    std::string lc = code;
    std::transform(lc.begin(), lc.end(), lc.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Country c : kCountries)
        if (lc == country_code(c)) return c;
    throw DataError("unknown country code: " + code);
}

namespace {

const char* gender_token(Gender g) { return g == Gender::Man ? "man" : "woman"; }
const char* age_token(AgeBand a) { return a == AgeBand::BelowMedian ? "age_lo" : "age_hi"; }
const char* income_token(IncomeBand i) { return i == IncomeBand::BelowMedian ? "inc_lo" : "inc_hi"; }
const char* concern_token(Concern c) { return c == Concern::Concerned ? "concern" : "no_concern"; }
const char* trust_token(Trust t) { return t == Trust::Trusts ? "trust" : "no_trust"; }

const char* median_phrase(bool above) { return above ? "above median" : "below median"; }

}  // namespace

std::string Segment::key() const {
    std::string k = country_code(country);
    k += '_';
    k += gender_token(gender);
    k += '_';
    k += age_token(age);
    k += '_';
    k += income_token(income);
    k += '_';
    k += concern_token(concern);
    k += '_';
    k += trust_token(trust);
    return k;
}

std::vector<Segment> enumerate_segments() {
    std::vector<Segment> out;
    out.reserve(160);
    for (Country country : kCountries)
        for (Gender gender : {Gender::Man, Gender::Woman})
            for (AgeBand age : {AgeBand::BelowMedian, AgeBand::AboveMedian})
                for (IncomeBand income : {IncomeBand::BelowMedian, IncomeBand::AboveMedian})
                    for (Concern concern : {Concern::Concerned, Concern::NotConcerned})
                        for (Trust trust : {Trust::Trusts, Trust::NotTrusts})
                            out.push_back({country, gender, age, income, concern, trust});
    return out;
}

Segment segment_from_key(const std::string& key) {
    // country code is the first token; the rest are fixed-vocabulary tokens,
    // two of which ("age_lo", "inc_hi", "no_trust"...) contain underscores, so
    // match against the six known token spellings instead of splitting.
    auto starts = [](const std::string& s, std::size_t pos, const char* tok) {
        std::string t = tok;
        return s.compare(pos, t.size(), t) == 0 &&
               (pos + t.size() == s.size() || s[pos + t.size()] == '_');
    };
    Segment seg{};
    std::size_t pos = 0;
    bool found = false;
    for (Country c : kCountries)
        if (starts(key, pos, country_code(c))) {
            seg.country = c;
            pos += 3;
            found = true;
            break;
        }
    if (!found) throw DataError("bad segment key (country): " + key);

    auto expect = [&](std::initializer_list<std::pair<const char*, int>> options,
                      const char* what) -> int {
        for (auto& [tok, val] : options)
            if (starts(key, pos, tok)) {
                pos += std::string(tok).size();
                if (pos < key.size()) ++pos;  // skip '_'
                return val;
            }
        throw DataError(std::string("bad segment key (") + what + "): " + key);
    };
    seg.gender = static_cast<Gender>(expect({{"man", 0}, {"woman", 1}}, "gender"));
    seg.age = static_cast<AgeBand>(expect({{"age_lo", 0}, {"age_hi", 1}}, "age"));
    seg.income = static_cast<IncomeBand>(expect({{"inc_lo", 0}, {"inc_hi", 1}}, "income"));
    seg.concern = static_cast<Concern>(expect({{"no_concern", 1}, {"concern", 0}}, "concern"));
    seg.trust = static_cast<Trust>(expect({{"no_trust", 1}, {"trust", 0}}, "trust"));
    if (pos != key.size() && pos != key.size() + 1)
        throw DataError("bad segment key (trailing): " + key);
    return seg;
}

std::string render_system_prompt(const Segment& s) {
    std::string p = "You are a ";
    p += gender_token(s.gender);
    p += ", aged ";
    p += median_phrase(s.age == AgeBand::AboveMedian);
    p += ", permanently resides in ";
    p += country_display_name(s.country);
    p += ", and your monthly income is ";
    p += median_phrase(s.income == IncomeBand::AboveMedian);
    p += ". You ";
    p += s.concern == Concern::Concerned ? "concern" : "cannot say that you concern";
    p += " environment protection in your daily life and ";
    p += s.trust == Trust::Trusts ? "believe" : "cannot say that you believe";
    p += " that the money you pay for carbon offsets are really used to offset emissions.";
    return p;
}

void write_segments_csv(const std::string& path, const std::vector<Segment>& segments) {
    csv::Writer w(path);
    w.row({"key", "country", "gender", "age", "income", "concern", "trust"});
    for (const Segment& s : segments)
        w.row({s.key(), country_code(s.country), gender_token(s.gender), age_token(s.age),
               income_token(s.income), concern_token(s.concern), trust_token(s.trust)});
}

}  // namespace offsetsim
