#include <cmath>

#include "doctest.h"
#include "ivd/diffeo.hpp"
#include "ivd/errors.hpp"

using namespace ivd;

namespace {
Interval half_line() {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = std::numeric_limits<double>::infinity();
    iv.lower_closed = true;
    return iv;
}
Interval whole_line() {
    Interval iv;
    iv.lower = -std::numeric_limits<double>::infinity();
    iv.upper = std::numeric_limits<double>::infinity();
    return iv;
}
Interval unit(bool closed = true) {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = 1.0;
    iv.lower_closed = closed;
    iv.upper_closed = closed;
    return iv;
}
}  // namespace

TEST_CASE("verify accepts the standard examples") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    CHECK(f.verify().ok);
    Diffeo q = Diffeo::from_expr("x^2", unit(), {0.0, 1.0});
    CHECK(q.verify().ok);
}

TEST_CASE("verify flags an undeclared fixed point") {
    Diffeo f = Diffeo::from_expr("x - sin(x)/10", whole_line(), {0.0});
    VerifyReport rep = f.verify();
    CHECK_FALSE(rep.ok);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("undeclared fixed point") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("iterate follows the closed form of x/(1+x)") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    // f^n(x) = x/(1+nx)
    CHECK(f.iterate(1.0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(f.iterate(0.5, -1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.iterate(0.0, 5) == 0.0);
    // group property within solver tolerance
    for (long long m : {1LL, 3LL}) {
        for (long long n : {-2LL, 2LL}) {
            double lhs = f.iterate(f.iterate(0.7, m), n);
            double rhs = f.iterate(0.7, m + n);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        }
    }
}

TEST_CASE("gap classification and the sign condition") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    Diffeo g = Diffeo::from_expr("x/(1+2*x)", half_line(), {0.0});
    REQUIRE(f.gaps().size() == 1);
    CHECK(f.gaps()[0].cls == SemigroupClass::SMinus);
    CHECK(f.gaps()[0].d() == 0.0);
    CHECK(sign_condition(f, g).status == Status::Holds);
    CHECK(sign_condition(f, f).status == Status::Holds);

    Diffeo up = Diffeo::from_expr("x + flat0(exp(-1/x^2))", half_line(), {0.0});
    CHECK(up.gaps()[0].cls == SemigroupClass::SPlus);
    auto sc = sign_condition(f, up);
    CHECK(sc.status == Status::Fails);
    CHECK(sc.witness_x.has_value());
}

TEST_CASE("orbit counts against the closed form") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    // orbit of 1: x_n = 1/(1+n); window [1/11, 1/2] holds n = 1..10
    OrbitCount c = f.orbit_count(1.0 / 11.0, 0.5, 1.0);
    CHECK(c.count == 10);
    CHECK_FALSE(c.budget_exceeded);
    // a window with no orbit point
    OrbitCount z = f.orbit_count(0.52, 0.55, 1.0);
    CHECK(z.count == 0);
}

TEST_CASE("flat maps exhaust the orbit budget inside the window") {
    Diffeo f = Diffeo::from_expr("x - flat0(exp(-1/x))", half_line(), {0.0});
    OrbitCount c = f.orbit_count(0.025, 0.05, 0.5, 3'000'000);
    CHECK(c.budget_exceeded);
    CHECK(c.count > 0);  // reached the window and counted a lower bound
    Diffeo g = Diffeo::from_expr("x - flat0(exp(-1/x^2))", half_line(), {0.0});
    OrbitCount cg = g.orbit_count(0.025, 0.05, 0.5, 200'000);
    CHECK(cg.budget_exceeded);
    CHECK(cg.count == 0);  // cannot even reach the window
}

TEST_CASE("alignment of fixed sets") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    Diffeo g = Diffeo::from_expr("x/(1+2*x)", half_line(), {0.0});
    Alignment a = align_fixed_sets(f, g);
    CHECK(a.ok);
    CHECK(a(0.0) == 0.0);

    Interval iv = whole_line();
    Diffeo h1 = Diffeo::from_expr("x - sin(x)/10", iv, {0.0, M_PI});
    Diffeo h2 = Diffeo::from_expr("x - sin(x)/10", iv, {0.0});
    Alignment bad = align_fixed_sets(h1, h2);
    CHECK_FALSE(bad.ok);

    // 1/2 -> 0 translation-style alignment
    Diffeo p = Diffeo::from_expr("x + flat0(exp(-1/(x-1/2)^2))", whole_line(), {0.5});
    Diffeo q = Diffeo::from_expr("x + flat0(exp(-1/x^2))", whole_line(), {0.0});
    Alignment tr = align_fixed_sets(p, q);
    CHECK(tr.ok);
    CHECK(tr(0.5) == doctest::Approx(0.0));
}

TEST_CASE("monotone orbits stay ordered") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    double prev = f.iterate(0.9, 1);
    for (int n = 2; n < 12; ++n) {
        double cur = f.iterate(0.9, n);
        CHECK(cur < prev);
        CHECK(cur > 0.0);
        prev = cur;
    }
}
