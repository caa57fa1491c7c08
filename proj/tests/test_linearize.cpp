#include <cmath>

#include "doctest.h"
#include "ivd/errors.hpp"
#include "ivd/linearize.hpp"

using namespace ivd;

namespace {
Interval unit_half_open() {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = 1.0;
    iv.lower_closed = true;
    return iv;
}
Interval unit_closed() {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = 1.0;
    iv.lower_closed = true;
    iv.upper_closed = true;
    return iv;
}
Interval half_line() {
    Interval iv;
    iv.lower = 0.0;
    iv.upper = std::numeric_limits<double>::infinity();
    iv.lower_closed = true;
    return iv;
}
}  // namespace

TEST_CASE("sternberg iteration for identical pairs is the identity") {
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit_half_open(), {0.0});
    SternbergResult r = sternberg_iterate(f, f, 1.0, 0.3, 60, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.value == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("sternberg limit conjugates x/(2-x) to x/2") {
    // oracle: h_n(x) = x / (1 - x + 2^{-n} x) -> x/(1-x); at 0.3: 3/7
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit_half_open(), {0.0});
    Diffeo g = Diffeo::from_expr("x/2", unit_half_open(), {0.0});
    SternbergResult r = sternberg_iterate(f, g, 1.0, 0.3, 60, 1e-13);
    REQUIRE(r.converged);
    CHECK(r.iterations >= 20);
    CHECK(std::abs(r.value - 3.0 / 7.0) < 1e-6);
    // the limit conjugates: h(f(x)) = g(h(x)) on [0.05, 0.4]
    for (double x : {0.05, 0.12, 0.25, 0.4}) {
        double hx = sternberg_iterate(f, g, 1.0, x, 80, 1e-13).value;
        double hfx = sternberg_iterate(f, g, 1.0, f.eval(x), 80, 1e-13).value;
        CHECK(std::abs(hfx - g.eval(hx)) < 1e-6);
    }
}

TEST_CASE("divergent sternberg construction is flagged") {
    // the S_+ pair x+x^2, x+2x^2 taken through their inverses, lambda = 2
    Diffeo fi = Diffeo::from_expr("(sqrt(1+4*x)-1)/2", half_line(), {0.0});
    Diffeo gi = Diffeo::from_expr("(sqrt(1+8*x)-1)/4", half_line(), {0.0});
    SternbergResult r = sternberg_iterate(fi, gi, 2.0, 0.3, 120, 1e-12);
    CHECK_FALSE(r.converged);
}

TEST_CASE("linearizer of the Moebius map") {
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit_half_open(), {0.0});
    LinearizerGrid g = linearizer(f, 0.0, 0.05, 0.5);
    CHECK(g.multiplier == doctest::Approx(0.5));
    // oracle: alpha(x) = x/(1-x)
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
        double x = g.xs[i];
        CHECK(g.values[i] == doctest::Approx(x / (1 - x)).epsilon(1e-8));
    }
    CHECK(g.residual < 1e-9);

    Diffeo lin = Diffeo::from_expr("x/2", unit_half_open(), {0.0});
    LinearizerGrid gl = linearizer(lin, 0.0, 0.05, 0.5);
    for (std::size_t i = 0; i < gl.xs.size(); ++i)
        CHECK(gl.values[i] == doctest::Approx(gl.xs[i]).epsilon(1e-12));

    Diffeo par = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    CHECK_THROWS_AS(linearizer(par, 0.0, 0.05, 0.5), NumericError);
}

TEST_CASE("robbin modulus of the Moebius flow map is 1/t") {
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit_closed(), {0.0, 1.0});
    Modulus m = robbin_modulus(f, f.gaps()[0]);
    REQUIRE(m.ts.size() > 8);
    for (std::size_t i = 0; i < m.ts.size(); ++i) {
        CHECK(std::log(m.values[i]) + std::log(m.ts[i]) == doctest::Approx(0.0).epsilon(1e-6));
    }
    ModulusComparison self = modulus_equal(m, m, 1e-9);
    CHECK(self.comparable);
    CHECK(self.equal);
}

TEST_CASE("modulus invariance under a normalized conjugation") {
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit_closed(), {0.0, 1.0});
    // s has unit derivatives at both ends, so the normalized moduli agree raw
    SmoothMapPtr s = make_expr("x + (x*(1-x))^2");
    Diffeo g(make_conjugate(f.map_ptr(), s, 0.0, 1.0), unit_closed(), {0.0, 1.0});
    Modulus mf = robbin_modulus(f, f.gaps()[0]);
    Modulus mg = robbin_modulus(g, g.gaps()[0]);
    ModulusComparison cmp = modulus_equal(mf, mg, 1e-6);
    CHECK(cmp.comparable);
    CHECK(cmp.equal);
    ModulusMatch match = modulus_equivalent(mf, mg, 1e-6);
    CHECK(match.equivalent);
}

TEST_CASE("raw moduli distinguish maps from different flows") {
    // same end multipliers (1/2, 2), different vector fields
    Diffeo f = Diffeo::from_expr("x/(2-x)", unit_closed(), {0.0, 1.0});
    Expr field = Expr::parse("-0.6931471805599453*x*(1-x)*(1 + x*(1-x))");
    Diffeo g(std::make_shared<FlowMap>(field, 1.0, 96), unit_closed(), {0.0, 1.0});
    REQUIRE(g.verify().ok);
    CHECK(g.derivative(0.0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(g.derivative(1.0) == doctest::Approx(2.0).epsilon(1e-6));
    Modulus mf = robbin_modulus(f, f.gaps()[0]);
    Modulus mg = robbin_modulus(g, g.gaps()[0], 40);
    ModulusComparison cmp = modulus_equal(mf, mg, 1e-4);
    CHECK(cmp.comparable);
    CHECK_FALSE(cmp.equal);  // distinguishable at this tolerance
}

TEST_CASE("conventional multiplier of x/(1+x)") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    MultiplierGrid u = conventional_multiplier(f, f.gaps()[0], 1.0, +1, 17, 400000);
    REQUIRE_FALSE(u.refused);
    // oracle: u_+(x) = 1/x - 1/a (so u_+(a) = 0, u_+(f(a)) = 1, u_+(2) = -1/2)
    for (std::size_t i = 0; i < u.xs.size(); ++i) {
        double x = u.xs[i];
        CHECK(u.values[i] == doctest::Approx(1.0 / x - 1.0).epsilon(2e-4));
    }

    Diffeo flat = Diffeo::from_expr("x - flat0(exp(-1/x))", half_line(), {0.0});
    MultiplierGrid r = conventional_multiplier(flat, flat.gaps()[0], 0.5, +1, 9, 50000);
    CHECK(r.refused);
}
