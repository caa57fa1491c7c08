#include <random>

#include "ivd/errors.hpp"
#include "ivd/series.hpp"
#include "doctest.h"

using namespace ivd;

namespace {
FormalSeries S(const std::string& text, int order = 12) {
    return FormalSeries::parse(text, order);
}
}  // namespace

TEST_CASE("series parsing and printing") {
    FormalSeries p = S("X + 5X^4 + 50X^7");
    CHECK(p.coeff(1) == 1);
    CHECK(p.coeff(4) == 5);
    CHECK(p.coeff(7) == 50);
    CHECK(p.coeff(2) == 0);
    CHECK(S("-X + (1/2)X^2").coeff(2) == Rational(1, 2));
    CHECK(S("-X + (1/2)X^2").coeff(1) == -1);
    CHECK(S("3/2X^3").coeff(3) == Rational(3, 2));
}

TEST_CASE("compose basics") {
    CHECK(compose(FormalSeries::identity(12), S("X + X^2")) == S("X + X^2"));
    CHECK(compose(S("2X"), S("X + X^2")) == S("2X + 2X^2"));
    // (X + X^2) o (X + X^2) = X + 2X^2 + 2X^3 + X^4
    CHECK(compose(S("X + X^2"), S("X + X^2")) == S("X + 2X^2 + 2X^3 + X^4"));
}

TEST_CASE("invert basics") {
    CHECK(invert(FormalSeries::identity(12)) == FormalSeries::identity(12));
    CHECK(invert(S("2X")) == S("(1/2)X"));
    // reversion of X + X^2: signed Catalan numbers (oracle: (sqrt(1+4x)-1)/2)
    FormalSeries w = invert(S("X + X^2", 5));
    CHECK(w == S("X - X^2 + 2X^3 - 5X^4 + 14X^5", 5));
    CHECK_THROWS(invert(S("X^2")));
}

TEST_CASE("group laws hold exactly mod X^{N+1}") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(-4, 4);
    auto random_series = [&](bool unit_lead) {
        FormalSeries s(9);
        s.coeff(1) = unit_lead ? 1 : (num(rng) == 0 ? 2 : num(rng));
        if (s.coeff(1) == 0) s.coeff(1) = 3;
        for (int k = 2; k <= 9; ++k) s.coeff(k) = Rational(num(rng), 1 + (k % 3));
        return s;
    };
    for (int rep = 0; rep < 10; ++rep) {
        FormalSeries p = random_series(false), q = random_series(false), r = random_series(false);
        CHECK(compose(compose(p, q), r) == compose(p, compose(q, r)));
        FormalSeries w = invert(p);
        CHECK(compose(p, w) == FormalSeries::identity(9));
        CHECK(compose(w, p) == FormalSeries::identity(9));
    }
}

TEST_CASE("normal forms: hyperbolic") {
    auto c = normal_form(S("3X + X^2"));
    CHECK(c.form.kind == NormalForm::Kind::Hyperbolic);
    CHECK(c.form.lambda == 3);
    // witness actually conjugates to 3X
    FormalSeries nf = conjugate(S("3X + X^2"), c.witness);
    CHECK(nf == S("3X"));
}

TEST_CASE("normal forms: parabolic invariants") {
    auto c = normal_form(S("X + 5X^4 + 50X^7"));
    CHECK(c.form.kind == NormalForm::Kind::Parabolic);
    CHECK(c.form.p == 3);
    CHECK(c.form.alpha == 2);

    auto c2 = normal_form(S("X + X^4 + 2X^7"));
    CHECK(c2.form == c.form);

    auto c3 = normal_form(S("X"));
    CHECK(c3.form.kind == NormalForm::Kind::FlatToOrderN);
}

TEST_CASE("normal_form is a class function") {
    std::mt19937_64 rng(20240916);
    std::uniform_int_distribution<int> num(-3, 3);
    FormalSeries p = S("X + X^2 + X^3", 9);
    for (int rep = 0; rep < 12; ++rep) {
        FormalSeries h(9);
        h.coeff(1) = Rational(1 + std::abs(num(rng)) % 3, 1);
        for (int k = 2; k <= 9; ++k) h.coeff(k) = Rational(num(rng), 2);
        FormalSeries q = conjugate(p, h);
        auto cp = normal_form(p.truncated(9));
        auto cq = normal_form(q);
        CHECK(cp.form == cq.form);
    }
}

TEST_CASE("parabolic alpha is invariant under dilations") {
    // cX conjugation maps X + aX^{p+1} + bX^{2p+1} to X + ac^p X^{p+1} + bc^{2p} X^{2p+1}
    FormalSeries p = S("X + 2X^3 + 5X^5", 9);
    auto cp = normal_form(p);
    for (int cnum : {2, 3, -2}) {
        FormalSeries h(9);
        h.coeff(1) = cnum;
        auto cq = normal_form(conjugate(p, h));
        CHECK(cq.form.p == cp.form.p);
        CHECK(cq.form.alpha == cp.form.alpha);
    }
}

TEST_CASE("are_conjugate: the jet verdicts") {
    // multiplier 3 classes
    CHECK(are_conjugate(S("3X + X^2"), S("3X + 2X^2")).conjugate);
    CHECK_FALSE(are_conjugate(S("3X + X^2"), S("2X")).conjugate);
    CHECK_FALSE(are_conjugate(S("3X + X^2"), S("2X + 17X^5")).conjugate);

    // tangent-to-identity classes
    CHECK(are_conjugate(S("X + X^2 + X^3"), S("X + 2X^2 + 4X^3 + 8X^4")).conjugate);
    CHECK_FALSE(are_conjugate(S("X + X^2 + X^3"), S("X + 3X^2 + 6X^3")).conjugate);
    CHECK_FALSE(are_conjugate(S("X + X^2 + X^3"), S("X + 2X^3")).conjugate);
    CHECK(are_conjugate(S("X + X^4 + 2X^7"), S("X + 5X^4 + 50X^7")).conjugate);

    // identity
    auto idw = are_conjugate(S("X"), S("X"));
    CHECK(idw.conjugate);
    CHECK(idw.undetermined_flat);
}

TEST_CASE("are_conjugate returns a checkable witness when rational") {
    FormalSeries p = S("X + X^2 + X^3"), q = S("X + 2X^2 + 4X^3 + 8X^4");
    auto w = are_conjugate(p, q);
    REQUIRE(w.conjugate);
    REQUIRE(w.witness.has_value());
    CHECK(conjugate(q, *w.witness) == p);

    // c^3 = 1/5 has no rational root: verdict true, witness absent
    auto w2 = are_conjugate(S("X + X^4 + 2X^7"), S("X + 5X^4 + 50X^7"));
    CHECK(w2.conjugate);
    CHECK_FALSE(w2.witness.has_value());
}

TEST_CASE("square and involutive jets") {
    CHECK(square(S("-X")) == S("X"));
    CHECK(is_involutive_jet(S("-X")));
    CHECK_FALSE(is_involutive_jet(S("-X + X^2")));
    // (-X + X^2) o (-X + X^2) = X - 2X^3 + ...
    FormalSeries sq = square(S("-X + X^2"));
    CHECK(sq.coeff(1) == 1);
    CHECK(sq.coeff(2) == 0);
    CHECK(sq.coeff(3) == -2);
    CHECK_FALSE(is_involutive_jet(S("(1/2)X")));
    CHECK(square(S("(1/2)X")).coeff(1) == Rational(1, 4));
}

TEST_CASE("centralizer descriptors") {
    CHECK(centralizer(S("2X + X^3")).kind == CentralizerDescriptor::Kind::FullLinear);
    auto c = centralizer(S("X + X^2"));
    CHECK(c.kind == CentralizerDescriptor::Kind::OneParameterParabolic);
    CHECK(c.p == 1);
    CHECK(centralizer(S("X")).kind == CentralizerDescriptor::Kind::TrivialJet);
}

TEST_CASE("negative multiplier normal form is only used through square") {
    CHECK_THROWS_AS(normal_form(S("-X + X^2")), NumericError);
    CHECK(normal_form(S("-2X")).form.lambda == -2);
}

TEST_CASE("rational helpers") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-7") == -7);
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(0.1) != Rational(1, 10));  // 0.1 is not dyadic
    CHECK(snap_rational(0.1000000000000002, 1e-9) == Rational(1, 10));
    CHECK(snap_rational(1.0 - 1e-13, 1e-9) == 1);
}
