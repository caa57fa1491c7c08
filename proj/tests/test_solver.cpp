#include <cmath>

#include "doctest.h"
#include "ivd/errors.hpp"
#include "ivd/solver.hpp"

using namespace ivd;

namespace {
Interval half_line() {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = std::numeric_limits<double>::infinity();
    iv.lower_closed = true;
    return iv;
}
Interval unit() {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = 1.0;
    iv.lower_closed = true;
    iv.upper_closed = true;
    return iv;
}
const Diffeo& mf() {
    static Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    return f;
}
const Diffeo& mg() {
    static Diffeo g = Diffeo::from_expr("x/(1+2*x)", half_line(), {0.0});
    return g;
}
}  // namespace

TEST_CASE("shooting on the Moebius pair recovers x/2") {
    ShootingOutcome out = phi_plus(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5);
    REQUIRE(out.ok);
    CHECK(out.lambda == doctest::Approx(0.5).epsilon(1e-8));
    const ConjugacyMap& phi = *out.map;
    for (int i = 0; i <= 20; ++i) {
        double x = 0.5 + 0.5 * i / 20.0;
        CHECK(std::abs(phi.eval(x) - 0.5 * x) < 1e-9);
    }
    CHECK(phi.residual() < 1e-9);
    CHECK(phi.self_check() < 1e-8);
    for (double x : {0.31, 0.11, 0.05 / 3.0, 1.0 / 21.0}) {
        CHECK(std::abs(phi.eval(x) - 0.5 * x) < 1e-8);
    }
}

TEST_CASE("self pair with alpha = f(a) returns f itself") {
    const Gap& g0 = mf().gaps()[0];
    ShootingOutcome out = phi_plus(mf(), g0, mf(), g0, 1.0, 0.5);  // f(1) = 1/2
    REQUIRE(out.ok);
    CHECK(out.lambda == doctest::Approx(1.0).epsilon(1e-8));
    for (double x : {0.55, 0.7, 0.95}) {
        CHECK(out.map->eval(x) == doctest::Approx(x / (1 + x)).epsilon(1e-9));
    }
}

TEST_CASE("wrong lambda misses the matching condition with the right sign") {
    D1Candidate cand = solve_d1(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5, 1.0);
    REQUIRE(cand.completed);
    double target = 0.5 / (1 + 2 * 0.5);  // g(alpha) = 0.25
    CHECK(cand.phi_at_fa < target);
    D1Candidate c2 = solve_d1(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5, 0.25);
    REQUIRE(c2.completed);
    CHECK(c2.phi_at_fa > target);
}

TEST_CASE("shooting mismatch is monotone in lambda") {
    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {0.2, 0.35, 0.5, 0.8, 1.3}) {
        D1Candidate c = solve_d1(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5, lam);
        REQUIRE(c.completed);
        CHECK(c.phi_at_fa < prev);
        prev = c.phi_at_fa;
    }
}

TEST_CASE("one-parameter family property") {
    ShootingOutcome one = phi_plus(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5);
    REQUIRE(one.ok);
    double b = 0.8;
    double alpha_p = one.map->eval(b);
    ShootingOutcome two = phi_plus(mf(), mf().gaps()[0], mg(), mg().gaps()[0], b, alpha_p);
    REQUIRE(two.ok);
    for (double x : {0.45, 0.6, 0.85, 1.1}) {
        CHECK(one.map->eval(x) == doctest::Approx(two.map->eval(x)).epsilon(1e-8));
    }
}

TEST_CASE("residual detects a corrupted candidate") {
    ShootingOutcome out = phi_plus(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5);
    REQUIRE(out.ok);
    const ConjugacyMap& phi = *out.map;
    auto corrupted = [&](double x) {
        double bump = (x > 0.7 && x < 0.8) ? 1e-3 : 0.0;
        return phi.eval(x) + bump;
    };
    double sup = 0.0;
    for (int i = 0; i <= 200; ++i) {
        double x = 0.5 + 0.5 * i / 200.0;
        double u = std::abs(mg().eval(corrupted(x)) - corrupted(mf().eval(x)));
        sup = std::max(sup, u);
    }
    CHECK(sup >= 1e-4);
}

TEST_CASE("endpoint derivative along the extension sequence") {
    ShootingOutcome out = phi_plus(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5);
    REQUIRE(out.ok);
    double x = 1.0;
    for (int n = 0; n < 25; ++n) x = mf().eval(x);
    CHECK(out.map->eval(x) / x == doctest::Approx(out.lambda).epsilon(1e-6));
}

TEST_CASE("probe on the Moebius pair reports finite limits everywhere") {
    ShootingOutcome out = phi_plus(mf(), mf().gaps()[0], mg(), mg().gaps()[0], 1.0, 0.5);
    REQUIRE(out.ok);
    SmoothnessDiagnostics diag = probe_smoothness(*out.map, 4, 0.7, 12, 400000);
    REQUIRE(diag.orders.size() == 4);
    for (const auto& od : diag.orders) {
        CHECK(od.kind == OrderDiagnostic::Kind::FiniteLimit);
    }
    CHECK(diag.orders[0].limit == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(std::abs(diag.orders[1].limit) < 1e-4);  // phi'' of x/2
}

TEST_CASE("compositional roots of x/(1+x) against the flow family") {
    const Gap& g0 = mf().gaps()[0];
    RootOutcome r2 = compositional_root(mf(), g0, 2, 1.0);
    REQUIRE(r2.ok);
    CHECK(r2.residual < 1e-7);
    CHECK(r2.root->eval(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    for (double x : {0.6, 0.8, 1.0}) {
        CHECK(r2.root->eval(x) == doctest::Approx(x / (1 + 0.5 * x)).epsilon(1e-7));
    }

    RootOutcome r3 = compositional_root(mf(), g0, 3, 1.0);
    REQUIRE(r3.ok);
    CHECK(r3.residual < 1e-7);
    for (double x : {0.6, 0.8, 1.0}) {
        CHECK(r3.root->eval(x) == doctest::Approx(x / (1 + x / 3.0)).epsilon(1e-7));
    }

    RootOutcome r1 = compositional_root(mf(), g0, 1, 1.0);
    REQUIRE(r1.ok);
    CHECK(r1.root->eval(0.7) == doctest::Approx(0.7 / 1.7).epsilon(1e-9));
}

TEST_CASE("two-sided agreement on a compact conjugate pair") {
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit(), {0.0, 1.0});
    SmoothMapPtr s = make_expr("x + (x*(1-x))^2");
    Diffeo g(make_conjugate(f.map_ptr(), s, 0.0, 1.0), unit(), {0.0, 1.0});
    REQUIRE(g.verify().ok);

    double a = 0.37;
    SmoothMapPtr sinv = make_inverse(s, 0.0, 1.0);
    double alpha = sinv->eval(a);
    ShootingOutcome plus = phi_plus(f, f.gaps()[0], g, g.gaps()[0], a, alpha);
    ShootingOutcome minus = phi_minus(f, f.gaps()[0], g, g.gaps()[0], a, alpha);
    REQUIRE(plus.ok);
    REQUIRE(minus.ok);
    CHECK(plus.lambda == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(minus.lambda == doctest::Approx(1.0).epsilon(1e-7));
    for (int i = 1; i < 12; ++i) {
        double x = i / 12.0;
        double oracle = sinv->eval(x);
        CHECK(std::abs(plus.map->eval(x) - oracle) < 1e-7);
        CHECK(std::abs(plus.map->eval(x) - minus.map->eval(x)) < 1e-7);
    }
}

TEST_CASE("sergeraert criterion") {
    SergeraertResult r = sergeraert_criterion(mf(), mf().gaps()[0], 0.5, 40.0);
    CHECK(r.satisfied);  // x - f(x) is monotone

    Diffeo up = Diffeo::from_expr("x + flat0(exp(-1/x^2))", half_line(), {0.0});
    SergeraertResult r2 = sergeraert_criterion(up, up.gaps()[0], 0.4, 40.0);
    CHECK(r2.satisfied);

    Diffeo osc = Diffeo::from_expr("x - flat0(exp(-(1/x)*(2 + sin(1/x)))/8)", half_line(), {0.0});
    REQUIRE(osc.verify().ok);
    SergeraertResult r3 = sergeraert_criterion(osc, osc.gaps()[0], 0.3, 40.0);
    CHECK_FALSE(r3.satisfied);
    CHECK(r3.worst_ratio > 40.0);
}
