#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace offsetsim {

// Round half up to two decimals (monetary render rule). Prices are positive.
inline double round_money(double x) { return std::floor(x * 100.0 + 0.5) / 100.0; }

// "103", "103.5", "98.76" -> always two decimals: "103.00", "103.50", "98.76".
inline std::string format_money(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", round_money(x));
    return buf;
}

// Compact decimal for CSV/JSON artifacts: shortest fixed representation that
// round-trips the value we care about; deterministic across runs.
inline std::string format_double(double x, int precision = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    return buf;
}

inline std::string format_int(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

}  // namespace offsetsim
