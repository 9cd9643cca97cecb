#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace offsetsim {

enum class Country : std::uint8_t { CN, DE, IN, SG, US };
enum class Gender : std::uint8_t { Man, Woman };
enum class AgeBand : std::uint8_t { BelowMedian, AboveMedian };
enum class IncomeBand : std::uint8_t { BelowMedian, AboveMedian };
enum class Concern : std::uint8_t { Concerned, NotConcerned };
enum class Trust : std::uint8_t { Trusts, NotTrusts };

inline constexpr std::array<Country, 5> kCountries = {Country::CN, Country::DE, Country::IN,
                                                      Country::SG, Country::US};

const char* country_code(Country c);          // "cn", "de", "in", "sg", "us"
const char* country_display_name(Country c);  // "China", "Germany", "India", "Singapore", "US"
Country country_from_code(const std::string& code);  // accepts "cn"/"CN"/...

// One air-traveller persona cell: country x gender x age x income x concern x
// trust. 5*2*2*2*2*2 = 160 cells.
struct Segment {
    Country country;
    Gender gender;
    AgeBand age;
    IncomeBand income;
    Concern concern;
    Trust trust;

    // Stable join key, e.g. "sg_man_age_hi_inc_hi_concern_trust".
    std::string key() const;

    bool operator==(const Segment&) const = default;
};

// All 160 segments in a fixed order: country-major, then gender, age, income,
// concern, trust, each cycling through its declared level order.
std::vector<Segment> enumerate_segments();

// Parses a key produced by Segment::key(). Throws DataError on a bad token.
Segment segment_from_key(const std::string& key);

// The persona system prompt for the chat backend. Pure; the same segment
// always renders to identical bytes.
std::string render_system_prompt(const Segment& s);

// One row per segment: key plus one column per field.
void write_segments_csv(const std::string& path, const std::vector<Segment>& segments);

}  // namespace offsetsim
