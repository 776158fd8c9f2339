#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "belleff/bounds.hpp"
#include "belleff/certificates.hpp"
#include "belleff/dist.hpp"
#include "test_support.hpp"

using namespace belleff;

TEST_CASE("certificate kind names round trip", "[certificates]") {
    for (CertKind k : {CertKind::inefficiency_resistant, CertKind::inefficiency_resistant_oneway,
                       CertKind::normalized})
        REQUIRE(cert_kind_from_name(cert_kind_name(k)) == k);
    REQUIRE_THROWS_AS(cert_kind_from_name("bogus"), input_error);
}

TEST_CASE("certificate kinds map to their strategy classes", "[certificates]") {
    REQUIRE(cert_strategy_class(CertKind::inefficiency_resistant) == StrategyClass::both_abort);
    REQUIRE(cert_strategy_class(CertKind::inefficiency_resistant_oneway) ==
            StrategyClass::alice_abort);
    REQUIRE(cert_strategy_class(CertKind::normalized) == StrategyClass::no_abort);
}

TEST_CASE("the half chsh functional certifies the pr box at 2", "[certificates]") {
    Certificate cert{CertKind::inefficiency_resistant, chsh_half(), Rat(2)};
    VerifyReport rep = verify_certificate(cert, pr_box());
    REQUIRE(rep.normalization_ok);
    REQUIRE(rep.strategy_max == 1);
    REQUIRE(rep.value_on_dist == 2);
    REQUIRE(rep.valid);
    REQUIRE(rep.detail.find("lower bound of 2") != std::string::npos);
}

TEST_CASE("a single oversized coefficient breaks normalization", "[certificates]") {
    BellFunctional f = zero_functional(2, 2, 2, 2);
    set_coeff(f, 0, 0, 0, 0, make_rat(3, 2));
    Certificate cert{CertKind::inefficiency_resistant, f, make_rat(3, 2)};
    VerifyReport rep = verify_certificate(cert, pr_box());
    REQUIRE(!rep.normalization_ok);
    REQUIRE(rep.strategy_max == make_rat(3, 2));
    REQUIRE(!rep.valid);
    // the witness collects exactly the oversized entry
    REQUIRE(rep.max_witness.alice[0] == 0);
    REQUIRE(rep.max_witness.bob[0] == 0);
    REQUIRE(strategy_value(f, rep.max_witness) == make_rat(3, 2));
    REQUIRE(rep.detail.find("normalization violated") != std::string::npos);
}

TEST_CASE("a zero functional cannot claim a positive value", "[certificates]") {
    Certificate cert{CertKind::inefficiency_resistant, zero_functional(2, 2, 2, 2), Rat(1)};
    VerifyReport rep = verify_certificate(cert, pr_box());
    REQUIRE(rep.normalization_ok);
    REQUIRE(!rep.value_ok);
    REQUIRE(!rep.valid);
    REQUIRE(rep.value_on_dist == 0);
    REQUIRE(rep.detail.find("exceeds") != std::string::npos);
}

TEST_CASE("scaling a valid certificate down keeps it valid", "[certificates]") {
    Certificate cert = *eff_bound(pr_box()).certificate;
    for (const Rat& c : {make_rat(1, 2), make_rat(1, 3)}) {
        Certificate scaled{cert.kind, scale_functional(cert.coeffs, c), c * cert.claimed_value};
        VerifyReport rep = verify_certificate(scaled, pr_box());
        REQUIRE(rep.valid);
        REQUIRE(rep.value_on_dist == c * cert.claimed_value);
    }
}

TEST_CASE("normalized certificates are not automatically abort resistant", "[certificates]") {
    // +3/2 everywhere in block (0,0), -3/2 everywhere in block (1,1): every
    // no-abort strategy collects exactly one entry from each block, so the
    // two cancel; a strategy aborting on x=1, y=1 keeps only the +3/2.
    BellFunctional f = zero_functional(2, 2, 2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            set_coeff(f, 0, 0, a, b, make_rat(3, 2));
            set_coeff(f, 1, 1, a, b, make_rat(-3, 2));
        }
    Certificate as_normalized{CertKind::normalized, f, Rat(0)};
    VerifyReport ok = verify_certificate(as_normalized, pr_box());
    REQUIRE(ok.strategy_max == 0);
    REQUIRE(ok.strategy_min == 0);
    REQUIRE(ok.valid);
    Certificate as_resistant{CertKind::inefficiency_resistant, f, Rat(0)};
    VerifyReport bad = verify_certificate(as_resistant, pr_box());
    REQUIRE(bad.strategy_max == make_rat(3, 2));
    REQUIRE(!bad.valid);
}

TEST_CASE("normalized verification checks the lower side too", "[certificates]") {
    BellFunctional f = zero_functional(2, 2, 2, 2);
    set_coeff(f, 0, 0, 0, 0, Rat(-2)); // fine for abort classes, too negative here
    Certificate cert{CertKind::normalized, f, Rat(-2)};
    VerifyReport rep = verify_certificate(cert, uniform_dist(2, 2, 2, 2));
    REQUIRE(rep.strategy_min == -2);
    REQUIRE(!rep.normalization_ok);
    REQUIRE(!rep.valid);
}

TEST_CASE("verification rejects a shape mismatch", "[certificates]") {
    Certificate cert{CertKind::inefficiency_resistant, zero_functional(2, 2, 2, 2), Rat(1)};
    REQUIRE_THROWS_AS(verify_certificate(cert, uniform_dist(3, 2, 2, 2)), input_error);
}

TEST_CASE("extracted certificates verify against other distributions too", "[certificates]") {
    // an inefficiency-resistant functional lower-bounds eff of whatever
    // distribution it evaluates high on, not just the one it came from
    Certificate cert = *eff_bound(pr_box()).certificate;
    std::mt19937 gen(90);
    for (int trial = 0; trial < 3; ++trial) {
        Dist q = testsupport::random_nonsignaling(gen);
        const Rat on_q = bell_value(cert.coeffs, q);
        Certificate retargeted{cert.kind, cert.coeffs, on_q};
        if (on_q > 0) {
            VerifyReport rep = verify_certificate(retargeted, q);
            REQUIRE(rep.valid);
            REQUIRE(eff_bound(q).bound_value >= on_q);
        }
    }
}

TEST_CASE("verification respects the term cap", "[certificates]") {
    Certificate cert{CertKind::inefficiency_resistant, zero_functional(2, 2, 2, 2), Rat(1)};
    REQUIRE_THROWS_AS(verify_certificate(cert, uniform_dist(2, 2, 2, 2), 3), too_large_error);
}
