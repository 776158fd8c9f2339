#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "belleff/errors.hpp"

namespace belleff {

using Int = boost::multiprecision::cpp_int;

/// Exact rational scalar. Arbitrary-precision, always held in lowest terms
/// with positive denominator (the backend canonicalizes on every operation).
/// Expression templates are disabled so `auto` and ternaries behave.
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw input_error("rational with zero denominator");
    Rat r(num);
    r /= Rat(den);
    return r;
}

inline Rat make_rat(long long num, long long den) { return make_rat(Int(num), Int(den)); }

/// Strict "num" / "num/den" parser (optional leading '-' on the numerator).
inline Rat parse_rat(const std::string& s) {
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (!is_int(s)) throw input_error("bad rational literal: '" + s + "'");
        return Rat(Int(s));
    }
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || (!den.empty() && den[0] == '-'))
        throw input_error("bad rational literal: '" + s + "'");
    Int d(den);
    if (d == 0) throw input_error("bad rational literal (zero denominator): '" + s + "'");
    return make_rat(Int(num), d);
}

/// Canonical rendering: lowest terms, "num/den", integers without "/1".
inline std::string rat_to_string(const Rat& r) { return r.str(); }

inline double to_double(const Rat& r) { return static_cast<double>(r); }
inline long double to_long_double(const Rat& r) { return static_cast<long double>(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// 2^e for any integer e (negative exponents give exact dyadic fractions).
inline Rat rat_pow2(long e) {
    Int p = Int(1) << static_cast<unsigned>(e < 0 ? -e : e);
    return e < 0 ? make_rat(Int(1), p) : Rat(p);
}

inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat acc(1), b = base;
    while (e) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline Int rat_floor(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (r < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

inline Int rat_ceil(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (r > 0 && q * denominator(r) != numerator(r)) ++q;
    return q;
}

/// Exact conversion of a finite long double (no rounding happens here:
/// every binary float is a dyadic rational). Mantissa bits are peeled off
/// in 64-bit chunks, so any binary format up to 256 bits is covered.
inline Rat exact_from_long_double(long double v) {
    if (!std::isfinite(static_cast<double>(v)))
        throw input_error("cannot convert non-finite float to rational");
    if (v == 0.0L) return Rat(0);
    const bool neg = v < 0;
    int e = 0;
    long double m = std::frexp(neg ? -v : v, &e); // m in [0.5, 1)
    Int mant = 0;
    int shifted = 0;
    while (m != 0.0L && shifted < 256) {
        m *= 18446744073709551616.0L; // 2^64; stays < 2^64 since m < 1
        const long double chunk = std::floor(m);
        mant <<= 64;
        mant += Int(static_cast<std::uint64_t>(chunk));
        m -= chunk;
        shifted += 64;
    }
    Rat r = Rat(mant) * rat_pow2(e - shifted);
    return neg ? Rat(-r) : r;
}

namespace detail {

/// Continued-fraction walk over an exact nonnegative target. Calls
/// visit(h, k, a, h_prev, k_prev) after each convergent h/k (term a);
/// stops when visit returns true or the expansion terminates.
template <typename Visit>
inline void continued_fraction_walk(const Rat& target, Visit visit) {
    Int p = numerator(target), q = denominator(target);
    Int h0 = 1, k0 = 0; // h_{-1}, k_{-1}
    Int h1 = 0, k1 = 1; // h_{-2}, k_{-2}
    while (q != 0) {
        Int a = p / q;
        Int h = a * h0 + h1, k = a * k0 + k1;
        if (visit(h, k, a, h0, k0)) return;
        h1 = h0; k1 = k0; h0 = h; k0 = k;
        Int r = p - a * q;
        p = q; q = r;
    }
}

} // namespace detail

/// Smallest-denominator-ish approximation within a relative tolerance:
/// the first continued-fraction convergent r with |r - t| <= tol * |t|.
/// Convergents are best approximations, so the result has the least
/// denominator among all convergents meeting the tolerance.
inline Rat approximate_within(const Rat& target, const Rat& rel_tol) {
    if (rel_tol < 0) throw input_error("negative tolerance");
    if (target == 0) return Rat(0);
    const bool neg = target < 0;
    const Rat t = rat_abs(target);
    const Rat budget = rel_tol * t;
    Rat best = t;
    detail::continued_fraction_walk(t, [&](const Int& h, const Int& k, const Int&, const Int&, const Int&) {
        Rat c = make_rat(h, k);
        if (rat_abs(c - t) <= budget) {
            best = c;
            return true;
        }
        return false;
    });
    return neg ? Rat(-best) : best;
}

/// Best rational approximation of target with denominator <= max_den.
/// Ties resolved toward the smaller denominator, then the smaller numerator.
inline Rat approximate_denominator_capped(const Rat& target, const Int& max_den) {
    if (max_den < 1) throw input_error("denominator cap must be >= 1");
    if (denominator(target) <= max_den) return target;
    const bool neg = target < 0;
    const Rat t = rat_abs(target);
    Rat best = Rat(rat_floor(t)); // always admissible (denominator 1)
    auto consider = [&](const Rat& cand) {
        Rat d_new = rat_abs(cand - t), d_old = rat_abs(best - t);
        if (d_new < d_old) best = cand;
        else if (d_new == d_old && denominator(cand) < denominator(best)) best = cand;
        else if (d_new == d_old && denominator(cand) == denominator(best) &&
                 numerator(cand) < numerator(best)) best = cand;
    };
    detail::continued_fraction_walk(
        t, [&](const Int& h, const Int& k, const Int& a, const Int& hp, const Int& kp) {
            if (k <= max_den) {
                consider(make_rat(h, k));
                return false;
            }
            // Convergent too big: best semiconvergent under the cap, then stop.
            if (kp > 0) {
                Int a_cut = (max_den - (k - a * kp)) / kp; // k_prev2 = k - a*kp
                if (a_cut > 0 && a_cut < a) {
                    Int hs = a_cut * hp + (h - a * hp);
                    Int ks = a_cut * kp + (k - a * kp);
                    if (ks >= 1 && ks <= max_den) consider(make_rat(hs, ks));
                }
            }
            return true;
        });
    return neg ? Rat(-best) : best;
}

} // namespace belleff
