#include <cmath>

#include "doctest.h"
#include "ivd/classifier.hpp"
#include "ivd/report.hpp"

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
Interval closed(double a, double b) {
    Interval iv;
    iv.lower = a;
    iv.upper = b;
    iv.lower_closed = true;
    iv.upper_closed = true;
    return iv;
}
ClassifyOptions fast() {
    ClassifyOptions opt;
    opt.solver.field_grid = 320;
    opt.solver.walk_budget = 250'000;
    opt.shape_points = 80;
    return opt;
}
}  // namespace

TEST_CASE("self-classification is conjugate") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    ConjugacyReport rep = classify(f, f, fast());
    CHECK(rep.verdict == Verdict::Conjugate);
    REQUIRE(rep.gaps.size() == 1);
    CHECK(rep.gaps[0].lambda.value_or(0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("the Moebius pair classifies as conjugate with lambda 1/2") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    Diffeo g = Diffeo::from_expr("x/(1+2*x)", half_line(), {0.0});
    ConjugacyReport rep = classify(f, g, fast());
    CHECK(rep.verdict == Verdict::Conjugate);
    REQUIRE(rep.gaps.size() == 1);
    // the pipeline picks its own base pair; the coset of lambdas is
    // {phi'(0)} = the one-parameter family, here containing 1/2
    CHECK(rep.gaps[0].residual.value_or(1) < 1e-7);
    CHECK(rep.fixed_points[0].t_status == Status::Holds);

    // verdict symmetry
    ConjugacyReport rev = classify(g, f, fast());
    CHECK(rev.verdict == Verdict::Conjugate);
}

TEST_CASE("multiplier mismatch is caught by T and P") {
    Diffeo f = Diffeo::from_expr("x/2", half_line(), {0.0});
    Diffeo g = Diffeo::from_expr("x/3", half_line(), {0.0});
    ConjugacyReport rep = classify(f, g, fast());
    CHECK(rep.verdict == Verdict::NotConjugate);
    bool t_fails = false, p_fails = false;
    for (const auto& c : rep.conditions) {
        if (c.name == "T" && c.status == Status::Fails) t_fails = true;
        if (c.name == "P" && c.status == Status::Fails) p_fails = true;
    }
    CHECK(t_fails);
    CHECK(p_fails);
}

TEST_CASE("the sine pair on [0, pi] fails at the multipliers") {
    Diffeo f = Diffeo::from_expr("x - sin(x)/10", closed(0, M_PI), {0.0, M_PI});
    Diffeo g = Diffeo::from_expr("x + sin(x)/10", closed(0, M_PI), {0.0, M_PI});
    ConjugacyReport rep = classify(f, g, fast());
    CHECK(rep.verdict == Verdict::NotConjugate);
    REQUIRE(rep.fixed_points.size() == 2);
    CHECK(rep.fixed_points[0].t_status == Status::Fails);
    CHECK(rep.fixed_points[0].mult_f == doctest::Approx(0.9));
    CHECK(rep.fixed_points[0].mult_g == doctest::Approx(1.1));
}

TEST_CASE("fixed-point-free maps on the line") {
    Diffeo f = Diffeo::from_expr("x + 1", whole_line(), {});
    Diffeo g = Diffeo::from_expr("x + 2", whole_line(), {});
    Diffeo h = Diffeo::from_expr("x - 1", whole_line(), {});
    CHECK(classify(f, g, fast()).verdict == Verdict::Conjugate);
    ConjugacyReport bad = classify(f, h, fast());
    CHECK(bad.verdict == Verdict::NotConjugate);
}

TEST_CASE("conjugation invariance: s-conjugates never classify as not-conjugate") {
    Diffeo f = Diffeo::from_expr("x/(1+x)", half_line(), {0.0});
    SmoothMapPtr s = make_expr("x + x^2/(4*(1+x))");
    Diffeo g(make_conjugate(f.map_ptr(), s, 0.0, std::numeric_limits<double>::infinity()),
             half_line(), {0.0});
    REQUIRE(g.verify().ok);
    ConjugacyReport rep = classify(f, g, fast());
    CHECK(rep.verdict != Verdict::NotConjugate);
    CHECK(rep.verdict == Verdict::Conjugate);  // Takens endpoint decides through T+P
}

TEST_CASE("flat pairs stay away from 'conjugate'") {
    ClassifyOptions opt = fast();
    opt.solver.products.budget = 300'000;
    opt.run_probe = false;
    Diffeo f = Diffeo::from_expr("x - flat0(exp(-1/x))", half_line(), {0.0});
    Diffeo g = Diffeo::from_expr("x - flat0(exp(-1/x^2))", half_line(), {0.0});
    ConjugacyReport rep = classify(f, g, opt);
    CHECK(rep.verdict != Verdict::Conjugate);
}

TEST_CASE("match_jets coset rules") {
    CosetDescriptor l, r;
    l.kind = r.kind = CosetDescriptor::Kind::Flat;
    l.lambda = 2.0;
    r.lambda = 1.0;
    l.generator = r.generator = 1.0;
    CHECK(match_jets(l, r, 1e-7) == Status::Fails);

    l.kind = r.kind = CosetDescriptor::Kind::Hyperbolic;
    l.lambda = 3.0;
    r.lambda = 12.0;
    l.generator = r.generator = 2.0;
    CHECK(match_jets(l, r, 1e-7) == Status::Holds);  // 12/3 = 2^2

    r.lambda = 10.0;
    CHECK(match_jets(l, r, 1e-7) == Status::Undetermined);
    r.connected = true;
    CHECK(match_jets(l, r, 1e-7) == Status::Holds);
}

TEST_CASE("orientation-reversing reduction") {
    Diffeo f = Diffeo::from_expr("-x", whole_line(), {0.0}, -1);
    Diffeo g = Diffeo::from_expr("-x", whole_line(), {0.0}, -1);
    CHECK(classify(f, g, fast()).verdict == Verdict::Conjugate);

    Diffeo h = Diffeo::from_expr("-2*x", whole_line(), {0.0}, -1);
    CHECK(classify(f, h, fast()).verdict == Verdict::NotConjugate);

    ClassifyOptions opt = fast();
    opt.run_probe = false;
    Diffeo p = Diffeo::from_expr("-x - x^3", whole_line(), {0.0}, -1);
    Diffeo q = Diffeo::from_expr("-x - 4*x^3", whole_line(), {0.0}, -1);  // conjugate by 2x
    ConjugacyReport rep = classify(p, q, opt);
    CHECK(rep.verdict == Verdict::Conjugate);
}

TEST_CASE("flowability of the Moebius flow map and a perturbed cousin") {
    Diffeo f = Diffeo::from_expr("x/(2-x)", closed(0, 1), {0.0, 1.0});
    FlowabilityReport fr = flowability_check(f, f.gaps()[0], fast());
    CHECK_FALSE(fr.not_flowable);
    CHECK(fr.pattern.monotone);
    CHECK(fr.consistent);
    CHECK(fr.mult_d == doctest::Approx(0.5));
    CHECK(fr.mult_c == doctest::Approx(2.0));

    // composing with a wiggle inside the gap breaks the shape pattern
    Diffeo pert = Diffeo::from_expr("(x + 0.02*sin(2*3.141592653589793*x))/(2 - x - 0.02*sin(2*3.141592653589793*x))",
                                    closed(0, 1), {0.0, 1.0});
    REQUIRE(pert.verify().ok);
    FlowabilityReport pr = flowability_check(pert, pert.gaps()[0], fast());
    CHECK(pr.not_flowable);
    CHECK(pr.pattern.extrema.size() >= 2);
}

TEST_CASE("report serialization is stable and complete") {
    Diffeo f = Diffeo::from_expr("x/2", half_line(), {0.0});
    Diffeo g = Diffeo::from_expr("x/3", half_line(), {0.0});
    ConjugacyReport rep = classify(f, g, fast());
    auto j1 = to_json(rep);
    auto j2 = to_json(classify(f, g, fast()));
    CHECK(format_report(j1) == format_report(j2));
    CHECK(j1.contains("verdict"));
    CHECK(j1.contains("conditions"));
    CHECK(j1.contains("gaps"));
    CHECK(j1.contains("fixed_points"));
    CHECK(j1["verdict"] == "not-conjugate");
}
