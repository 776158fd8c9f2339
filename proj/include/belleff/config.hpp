#pragma once

// Runtime knobs shared by the command line tools.
//
// Environment:
//   BELL_EFF_SEED  unsigned integer seed for every sampled computation
//   BELL_EFF_CAP   enumeration cap (strategies, support entries, terms)
//
// Command line flags override the environment, which overrides the defaults.

#include <cstdint>
#include <cstdlib>
#include <string>

#include "belleff/errors.hpp"
#include "belleff/rational.hpp"

namespace belleff {

struct Config {
    long long cap = 2'000'000;          // enumeration cap for bound computations
    long long verify_cap = 100'000'000; // term cap for certificate verification
    bool colgen = false;                // solve the bound LPs by column generation
    std::uint64_t seed = 0x5eed;        // Monte Carlo seed
    // dyadic scales are rationalized to this relative precision (1e-15)
    Rat scale_rel_tol = make_rat(1, 1'000'000'000'000'000LL);
    enum class Format { table, json };
    Format format = Format::table;
};

namespace configdetail {

inline long long parse_env_ll(const char* name, long long fallback, long long lo) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    char* end = nullptr;
    const long long parsed = std::strtoll(v, &end, 10);
    if (end == v || *end != '\0' || parsed < lo)
        throw input_error(std::string(name) + ": cannot parse \"" + v + "\"");
    return parsed;
}

}  // namespace configdetail

inline Config config_from_env() {
    Config c;
    const long long cap = configdetail::parse_env_ll("BELL_EFF_CAP", -1, 1);
    if (cap != -1) {
        c.cap = cap;
        c.verify_cap = cap;  // one knob caps every enumeration
    }
    c.seed = static_cast<std::uint64_t>(
        configdetail::parse_env_ll("BELL_EFF_SEED", static_cast<long long>(c.seed), 0));
    return c;
}

}  // namespace belleff
