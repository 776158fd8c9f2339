#pragma once

// Local deterministic strategies and exact optimization of Bell functionals
// over the three strategy classes: no aborts, only Alice may abort, both may
// abort. An aborted input contributes no outcome, so it contributes zero to
// every Bell functional term.
//
// max_bell_value enumerates the side with fewer full maps and best-responds
// on the other side input-by-input. Ties prefer the first output label;
// aborting is chosen only when strictly better than every label. The overall
// argmax keeps the first achiever in enumeration order, so witnesses are
// deterministic.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "belleff/bell.hpp"
#include "belleff/errors.hpp"
#include "belleff/rational.hpp"

namespace belleff {

enum class StrategyClass { no_abort, alice_abort, both_abort };

inline const char* strategy_class_name(StrategyClass c) {
    switch (c) {
        case StrategyClass::no_abort: return "NoAbort";
        case StrategyClass::alice_abort: return "AliceAbort";
        default: return "BothAbort";
    }
}

inline StrategyClass strategy_class_from_name(const std::string& s) {
    if (s == "NoAbort") return StrategyClass::no_abort;
    if (s == "AliceAbort") return StrategyClass::alice_abort;
    if (s == "BothAbort") return StrategyClass::both_abort;
    throw input_error("unknown strategy class \"" + s + "\"");
}

constexpr int kAbort = -1;

struct DetStrategy {
    std::vector<int> alice; // per x: output index, or kAbort
    std::vector<int> bob;   // per y
    StrategyClass cls = StrategyClass::both_abort;

    bool operator==(const DetStrategy&) const = default;
    bool operator<(const DetStrategy& o) const {
        if (alice != o.alice) return alice < o.alice;
        if (bob != o.bob) return bob < o.bob;
        return cls < o.cls;
    }
};

struct StrategyShape {
    int nx = 0, ny = 0, na = 0, nb = 0;
};

inline void require_conforming(const DetStrategy& s, const StrategyShape& shape) {
    if (static_cast<int>(s.alice.size()) != shape.nx ||
        static_cast<int>(s.bob.size()) != shape.ny)
        throw input_error("strategy map sizes do not match shape");
    for (int v : s.alice) {
        if (v == kAbort) {
            if (s.cls == StrategyClass::no_abort)
                throw input_error("abort in a NoAbort strategy");
        } else if (v < 0 || v >= shape.na) {
            throw input_error("alice output out of range");
        }
    }
    for (int v : s.bob) {
        if (v == kAbort) {
            if (s.cls != StrategyClass::both_abort)
                throw input_error("bob may not abort in this class");
        } else if (v < 0 || v >= shape.nb) {
            throw input_error("bob output out of range");
        }
    }
}

inline int evaluate(const DetStrategy& s, int x, int y, int a, int b) {
    return s.alice[static_cast<std::size_t>(x)] == a && s.bob[static_cast<std::size_t>(y)] == b
               ? 1
               : 0;
}

inline Int pow_int(long long base, int exp) {
    Int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Number of strategies in a class.
inline Int strategy_count(StrategyClass cls, const StrategyShape& shape) {
    const long long a_choices = shape.na + (cls != StrategyClass::no_abort ? 1 : 0);
    const long long b_choices = shape.nb + (cls == StrategyClass::both_abort ? 1 : 0);
    return pow_int(a_choices, shape.nx) * pow_int(b_choices, shape.ny);
}

namespace stratdetail {

// Mixed-radix walk over one side's maps. Digit order: labels 0..n-1, then
// abort (so abort sorts last and witnesses prefer real outputs).
inline bool next_map(std::vector<int>& digits, int labels, bool abortable) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        int& d = digits[i];
        if (d == kAbort) { // abort is the last digit value: carry
            d = 0;
            continue;
        }
        if (d + 1 < labels) {
            ++d;
            return true;
        }
        if (abortable) {
            d = kAbort;
            return true;
        }
        d = 0;
    }
    return false;
}

} // namespace stratdetail

/// Visit every strategy of the class exactly once. Throws too_large_error if
/// the class size exceeds `cap`.
inline void enumerate(StrategyClass cls, const StrategyShape& shape, long long cap,
                      const std::function<void(const DetStrategy&)>& visit) {
    if (shape.nx <= 0 || shape.ny <= 0 || shape.na <= 0 || shape.nb <= 0)
        throw input_error("strategy shape must be positive");
    const Int count = strategy_count(cls, shape);
    if (count > cap)
        throw too_large_error("strategy class has " + count.str() + " members, above the cap of " +
                              std::to_string(cap) +
                              "; use column generation (--colgen) instead of full enumeration");
    DetStrategy s;
    s.cls = cls;
    s.alice.assign(static_cast<std::size_t>(shape.nx), 0);
    const bool alice_abort = cls != StrategyClass::no_abort;
    const bool bob_abort = cls == StrategyClass::both_abort;
    do {
        s.bob.assign(static_cast<std::size_t>(shape.ny), 0);
        do {
            visit(s);
        } while (stratdetail::next_map(s.bob, shape.nb, bob_abort));
    } while (stratdetail::next_map(s.alice, shape.na, alice_abort));
}

inline std::vector<DetStrategy> enumerate_all(StrategyClass cls, const StrategyShape& shape,
                                              long long cap = 100'000'000) {
    std::vector<DetStrategy> out;
    enumerate(cls, shape, cap, [&](const DetStrategy& s) { out.push_back(s); });
    return out;
}

/// B(l) = sum over non-aborted (x,y) of the coefficient at the outputs.
inline Rat strategy_value(const BellFunctional& f, const DetStrategy& s) {
    Rat total = 0;
    for (int x = 0; x < f.nx; ++x) {
        const int a = s.alice[static_cast<std::size_t>(x)];
        if (a == kAbort) continue;
        for (int y = 0; y < f.ny; ++y) {
            const int b = s.bob[static_cast<std::size_t>(y)];
            if (b == kAbort) continue;
            total += f.coeff(x, y, a, b);
        }
    }
    return total;
}

struct BellMax {
    Rat value;
    DetStrategy witness;
    Int evaluated_terms = 0;
};

/// Exact maximum of B over a strategy class, with an achieving strategy.
inline BellMax max_bell_value(const BellFunctional& f, StrategyClass cls,
                              long long cap = 100'000'000) {
    StrategyShape shape{f.nx, f.ny, f.na, f.nb};
    const bool alice_abort = cls != StrategyClass::no_abort;
    const bool bob_abort = cls == StrategyClass::both_abort;
    const Int alice_maps = pow_int(shape.na + (alice_abort ? 1 : 0), shape.nx);
    const Int bob_maps = pow_int(shape.nb + (bob_abort ? 1 : 0), shape.ny);
    const bool enumerate_alice = alice_maps <= bob_maps;

    // terms = maps * (responder inputs * responder labels * enumerated inputs)
    const Int terms = enumerate_alice
                          ? alice_maps * shape.ny * (shape.nb + 1) * shape.nx
                          : bob_maps * shape.nx * (shape.na + 1) * shape.ny;
    if (terms > cap)
        throw too_large_error("best-response search needs " + terms.str() +
                              " coefficient evaluations, above the cap of " +
                              std::to_string(cap) +
                              "; use column generation (--colgen) instead of full enumeration");

    BellMax best;
    best.value = 0;
    best.evaluated_terms = terms;
    bool have = false;

    std::vector<int> outer(static_cast<std::size_t>(enumerate_alice ? shape.nx : shape.ny), 0);
    const int outer_labels = enumerate_alice ? shape.na : shape.nb;
    const bool outer_abort = enumerate_alice ? alice_abort : bob_abort;
    const int resp_inputs = enumerate_alice ? shape.ny : shape.nx;
    const int resp_labels = enumerate_alice ? shape.nb : shape.na;
    const bool resp_abort = enumerate_alice ? bob_abort : alice_abort;

    std::vector<int> response(static_cast<std::size_t>(resp_inputs));
    do {
        Rat total = 0;
        for (int r = 0; r < resp_inputs; ++r) {
            Rat best_here;
            int chosen = kAbort; // replaced below unless abort wins
            bool have_label = false;
            for (int lab = 0; lab < resp_labels; ++lab) {
                Rat t = 0;
                for (std::size_t o = 0; o < outer.size(); ++o) {
                    const int ov = outer[o];
                    if (ov == kAbort) continue;
                    t += enumerate_alice ? f.coeff(static_cast<int>(o), r, ov, lab)
                                         : f.coeff(r, static_cast<int>(o), lab, ov);
                }
                if (!have_label || t > best_here) {
                    best_here = t;
                    chosen = lab;
                    have_label = true;
                }
            }
            if (resp_abort && Rat(0) > best_here) {
                chosen = kAbort;
                best_here = 0;
            }
            response[static_cast<std::size_t>(r)] = chosen;
            total += best_here;
        }
        if (!have || total > best.value) {
            best.value = total;
            best.witness.cls = cls;
            if (enumerate_alice) {
                best.witness.alice = outer;
                best.witness.bob = response;
            } else {
                best.witness.alice = response;
                best.witness.bob = outer;
            }
            have = true;
        }
    } while (stratdetail::next_map(outer, outer_labels, outer_abort));
    return best;
}

/// Exact minimum (used by normalized certificates): min B = -max(-B).
inline BellMax min_bell_value(const BellFunctional& f, StrategyClass cls,
                              long long cap = 100'000'000) {
    BellMax m = max_bell_value(negate(f), cls, cap);
    m.value = -m.value;
    return m;
}

} // namespace belleff
