#pragma once

// Bell-inequality certificates and their exact verification.
//
// A certificate is a Bell functional B, a claimed value, and a kind that
// fixes the normalization condition:
//   inefficiency_resistant        max over BothAbort strategies of B(l) <= 1
//   inefficiency_resistant_oneway max over AliceAbort strategies of B(l) <= 1
//   normalized                    |B(l)| <= 1 over NoAbort strategies
// A valid certificate witnesses a lower bound of `claimed_value` on the
// matching quantity (efficiency bound, one-way efficiency bound, or nu)
// of any distribution p with B(p) >= claimed_value, because the bound is
// monotone under the normalization: verification just recomputes both
// sides exactly.

#include <string>

#include "belleff/bell.hpp"
#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/rational.hpp"
#include "belleff/strategies.hpp"

namespace belleff {

enum class CertKind { inefficiency_resistant, inefficiency_resistant_oneway, normalized };

inline const char* cert_kind_name(CertKind k) {
    switch (k) {
        case CertKind::inefficiency_resistant: return "inefficiency_resistant";
        case CertKind::inefficiency_resistant_oneway: return "inefficiency_resistant_oneway";
        default: return "normalized";
    }
}

inline CertKind cert_kind_from_name(const std::string& s) {
    if (s == "inefficiency_resistant") return CertKind::inefficiency_resistant;
    if (s == "inefficiency_resistant_oneway") return CertKind::inefficiency_resistant_oneway;
    if (s == "normalized") return CertKind::normalized;
    throw input_error("unknown certificate kind \"" + s + "\"");
}

/// Strategy class a kind's normalization quantifies over.
inline StrategyClass cert_strategy_class(CertKind k) {
    switch (k) {
        case CertKind::inefficiency_resistant: return StrategyClass::both_abort;
        case CertKind::inefficiency_resistant_oneway: return StrategyClass::alice_abort;
        default: return StrategyClass::no_abort;
    }
}

struct Certificate {
    CertKind kind = CertKind::inefficiency_resistant;
    BellFunctional coeffs;
    Rat claimed_value;
};

struct VerifyReport {
    Rat strategy_max;        // max of B over the kind's strategy class
    Rat strategy_min;        // min over the class; only checked for normalized
    Rat value_on_dist;       // B(p)
    bool normalization_ok = false;
    bool value_ok = false;   // B(p) >= claimed_value
    bool valid = false;      // both
    DetStrategy max_witness; // strategy achieving strategy_max
    Int evaluated_terms = 0;
    std::string detail;      // human-readable verdict
};

/// Exact verification: recomputes the strategy optimum and B(p).
inline VerifyReport verify_certificate(const Certificate& cert, const Dist& p,
                                       long long cap = 100'000'000) {
    require_same_shape(cert.coeffs, p);
    VerifyReport rep;
    const StrategyClass cls = cert_strategy_class(cert.kind);
    BellMax mx = max_bell_value(cert.coeffs, cls, cap);
    rep.strategy_max = mx.value;
    rep.max_witness = mx.witness;
    rep.evaluated_terms = mx.evaluated_terms;
    rep.normalization_ok = mx.value <= 1;
    if (cert.kind == CertKind::normalized) {
        BellMax mn = min_bell_value(cert.coeffs, cls, cap);
        rep.strategy_min = mn.value;
        rep.evaluated_terms += mn.evaluated_terms;
        rep.normalization_ok = rep.normalization_ok && mn.value >= -1;
    }
    rep.value_on_dist = bell_value(cert.coeffs, p);
    rep.value_ok = rep.value_on_dist >= cert.claimed_value;
    rep.valid = rep.normalization_ok && rep.value_ok;

    if (!rep.normalization_ok)
        rep.detail = std::string("normalization violated: a ") + strategy_class_name(cls) +
                     " strategy reaches " + rat_to_string(rep.strategy_max) +
                     (cert.kind == CertKind::normalized
                          ? " (min " + rat_to_string(rep.strategy_min) + ")"
                          : "");
    else if (!rep.value_ok)
        rep.detail = "claimed value " + rat_to_string(cert.claimed_value) +
                     " exceeds the certificate's value " + rat_to_string(rep.value_on_dist) +
                     " on this distribution";
    else
        rep.detail = "certifies a lower bound of " + rat_to_string(cert.claimed_value) +
                     " (value on distribution " + rat_to_string(rep.value_on_dist) +
                     ", strategy max " + rat_to_string(rep.strategy_max) + ")";
    return rep;
}

} // namespace belleff
