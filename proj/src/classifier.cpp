#include "ivd/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ivd/errors.hpp"

namespace ivd {

std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Conjugate: return "conjugate";
        case Verdict::NotConjugate: return "not-conjugate";
        default: return "undetermined";
    }
}

// ------ jets as exact series ------ //

FormalSeries series_at(const SmoothMap& f, double p, int order, double tol_jet) {
    Jet j = f.eval_jet(p, order);
    FormalSeries s(order);
    double scale = 1.0;
    for (int k = 1; k <= order; ++k) scale = std::max(scale, std::abs(j[k]));
    for (int k = 1; k <= order; ++k) {
        double c = j[k];
        if (std::abs(c) <= tol_jet * scale) continue;  // snap to zero
        s.coeff(k) = snap_rational(c, tol_jet * std::max(1.0, std::abs(c)));
    }
    return s;
}

namespace {

struct JetClass {
    enum class Kind { Hyperbolic, Takens, Flat } kind = Kind::Flat;
    double mult = 1.0;
    int p = 0;
    double alpha = 0.0;
    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::Hyperbolic: os << "hyperbolic(" << mult << ")"; break;
            case Kind::Takens: os << "takens(p=" << p << ", alpha=" << alpha << ")"; break;
            case Kind::Flat: os << "flat"; break;
        }
        return os.str();
    }
};

// classify one jet, raising the truncation when the resonant term is out of
// range of the default order
JetClass classify_jet(const SmoothMap& f, double p, const ClassifyOptions& opt) {
    JetClass out;
    double mult = f.derivative(p);
    out.mult = mult;
    if (std::abs(mult - 1.0) > opt.tol_jet) {
        out.kind = JetClass::Kind::Hyperbolic;
        return out;
    }
    for (int order : {opt.series_order, 2 * opt.series_order + 1}) {
        FormalSeries s = series_at(f, p, order, opt.tol_jet);
        s.coeff(1) = 1;  // multiplier snapped above
        try {
            Classified c = normal_form(s);
            if (c.form.kind == NormalForm::Kind::Parabolic) {
                out.kind = JetClass::Kind::Takens;
                out.p = c.form.p;
                out.alpha = to_double(c.form.alpha);
                return out;
            }
            out.kind = JetClass::Kind::Flat;
            return out;
        } catch (const NumericError&) {
            continue;  // resonant order beyond this truncation; retry deeper
        }
    }
    out.kind = JetClass::Kind::Flat;  // unresolved at the deepest truncation
    return out;
}

}  // namespace

JetConditionResult jet_condition_T(const SmoothMap& f, double pf, const SmoothMap& g, double pg,
                                   const ClassifyOptions& opt) {
    JetConditionResult out;
    JetClass cf, cg;
    try {
        cf = classify_jet(f, pf, opt);
        cg = classify_jet(g, pg, opt);
    } catch (const std::exception& e) {
        out.status = Status::Undetermined;
        out.note = std::string("jet classification failed: ") + e.what();
        return out;
    }
    out.class_f = cf.describe();
    out.class_g = cg.describe();
    out.mult_f = cf.mult;
    out.mult_g = cg.mult;

    if (cf.kind == JetClass::Kind::Hyperbolic || cg.kind == JetClass::Kind::Hyperbolic) {
        if (cf.kind != cg.kind) {
            out.status = Status::Fails;
            out.note = "multipliers differ";
            return out;
        }
        double diff = std::abs(std::log(cf.mult) - std::log(cg.mult));
        if (diff > 10 * opt.tol_match) {
            out.status = Status::Fails;
            out.note = "multipliers differ";
        } else if (diff <= opt.tol_match) {
            out.status = Status::Holds;
        } else {
            out.status = Status::Undetermined;
            out.note = "multipliers equal only marginally";
        }
        return out;
    }
    if (cf.kind == JetClass::Kind::Takens || cg.kind == JetClass::Kind::Takens) {
        if (cf.kind != cg.kind) {
            out.status = Status::Fails;
            out.note = "one jet is tangent to the identity to finite order, the other is flat "
                       "at this truncation";
            return out;
        }
        if (cf.p != cg.p) {
            out.status = Status::Fails;
            out.note = "tangency orders differ";
            return out;
        }
        double diff = std::abs(cf.alpha - cg.alpha);
        double scale = std::max({1.0, std::abs(cf.alpha), std::abs(cg.alpha)});
        if (diff > 10 * opt.tol_match * scale) {
            out.status = Status::Fails;
            out.note = "resonant invariants differ";
        } else if (diff <= opt.tol_match * scale) {
            out.status = Status::Holds;
        } else {
            out.status = Status::Undetermined;
            out.note = "resonant invariants equal only marginally";
        }
        return out;
    }
    out.flat_flat = true;
    out.status = Status::Undetermined;
    out.note = "both jets are the identity to the truncation order; deciding through the "
               "analytic conditions";
    return out;
}

// ------ interior matching ------ //

Status match_jets(const CosetDescriptor& left, const CosetDescriptor& right, double tol,
                  std::string* note) {
    auto set_note = [&](const std::string& s) {
        if (note) *note = s;
    };
    if (left.connected || right.connected) {
        set_note("a connected centralizer absorbs the mismatch");
        return Status::Holds;
    }
    double dl = std::log(left.lambda) - std::log(right.lambda);
    if (left.kind == CosetDescriptor::Kind::Flat && right.kind == CosetDescriptor::Kind::Flat) {
        // forced jets: the derivative at the point is rigid
        if (std::abs(dl) <= tol) {
            if (std::abs(std::log(left.lambda)) <= tol) {
                set_note("both forced jets are the identity");
                return Status::Holds;
            }
            set_note("first derivatives agree; higher forced-jet data not verified");
            return Status::Undetermined;
        }
        set_note("forced jets have different derivatives");
        return Status::Fails;
    }
    double lgen = std::log(left.generator);
    if (std::abs(lgen) > tol) {
        // lattice membership: lambda_l / lambda_r in gen^Z
        double q = dl / lgen;
        double frac = std::abs(q - std::round(q));
        if (frac * std::abs(lgen) <= tol) {
            set_note("multiplier cosets intersect on the iterate lattice");
            return Status::Holds;
        }
        set_note("no intersection on the iterate lattice; centralizer connectedness unknown");
        return Status::Undetermined;
    }
    if (std::abs(dl) <= tol) {
        set_note("derivatives agree");
        return Status::Holds;
    }
    set_note("derivatives differ and the centralizer is not known to be connected");
    return Status::Undetermined;
}

// ------ flowability ------ //

FlowabilityReport flowability_check(const Diffeo& f, const Gap& gap, const ClassifyOptions& opt) {
    FlowabilityReport rep;
    ShapeGrid grid = shape_grid(f, gap, 0.5 * (gap.lo + gap.hi), opt.shape_points,
                                opt.solver.products);
    rep.pattern = classify_pattern(grid, 1e-6);
    rep.mult_c = f.derivative(gap.c());
    rep.mult_d = f.derivative(gap.d());
    if (!rep.pattern.constant && !rep.pattern.monotone) {
        rep.not_flowable = true;
        std::ostringstream os;
        os << "F_a has " << rep.pattern.extrema.size()
           << " interior extrema per fundamental domain; a flow would make it monotone or "
              "constant";
        rep.note = os.str();
    }
    if (rep.pattern.constant &&
        (std::abs(rep.mult_c - 1.0) > 1e-6 || std::abs(rep.mult_d - 1.0) > 1e-6)) {
        rep.consistent = false;
        rep.note = "F_a is constant but the end multipliers are not 1";
    }
    return rep;
}

// ------ the pipeline ------ //

namespace {

enum class EndKind { Hyperbolic, Takens, Flat, None };

struct GapAnalysis {
    GapReport report;
    std::optional<double> deriv_at_lo, deriv_at_hi;
    bool sergeraert = false;
    Status e_status = Status::Undetermined;
    Status p_status = Status::Undetermined;
    Status shape_status = Status::Holds;
    std::string failure;
};

double interior_point(const Gap& g) {
    if (std::isfinite(g.lo) && std::isfinite(g.hi)) return 0.5 * (g.lo + g.hi);
    if (std::isfinite(g.lo)) return g.lo + 1.0;
    if (std::isfinite(g.hi)) return g.hi - 1.0;
    return 0.0;
}

Status merge(Status a, Status b) {
    if (a == Status::Fails || b == Status::Fails) return Status::Fails;
    if (a == Status::Undetermined || b == Status::Undetermined) return Status::Undetermined;
    return Status::Holds;
}

GapAnalysis analyze_gap(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                        EndKind lo_kind, EndKind hi_kind, const ClassifyOptions& opt) {
    GapAnalysis out;
    GapReport& rep = out.report;
    rep.f_lo = gf.lo;
    rep.f_hi = gf.hi;
    rep.g_lo = gg.lo;
    rep.g_hi = gg.hi;
    rep.cls = gf.cls == SemigroupClass::SMinus ? "S-" : "S+";

    const bool compact = gf.compact() && gg.compact();
    const bool fully_open = !std::isfinite(gf.d()) && !std::isfinite(gf.c());
    if (fully_open) {
        // fixed-point-free on an open interval: a single conjugacy class
        out.p_status = out.e_status = Status::Holds;
        rep.p_status = rep.e_status = Status::Holds;
        rep.note = "open-interval gap: matching sides of the diagonal suffice";
        return out;
    }

    double a = interior_point(gf);
    double alpha = interior_point(gg);

    ConditionPResult pr = condition_p(f, gf, g, gg, a, alpha, opt.solver.products);
    out.p_status = rep.p_status = pr.status;
    if (pr.status == Status::Fails) {
        out.failure = "P: " + (pr.note.empty() ? std::string("product diverges") : pr.note);
        return out;
    }
    if (pr.status == Status::Undetermined) {
        rep.note = "condition P undetermined: " + pr.note;
        out.e_status = rep.e_status = Status::Undetermined;
        return out;
    }

    ShootingOutcome plus = phi_plus(f, gf, g, gg, a, alpha, opt.solver);
    if (!plus.ok) {
        rep.note = "shooting failed: " + plus.note;
        out.e_status = rep.e_status = Status::Undetermined;
        return out;
    }
    rep.lambda = plus.lambda;
    rep.residual = plus.map->residual();
    if (std::isfinite(gf.lo) && plus.map->anchor() == gf.lo) out.deriv_at_lo = plus.lambda;
    else out.deriv_at_hi = plus.lambda;

    // connected-centralizer evidence on the gap
    try {
        double span = (std::isfinite(gf.lo) && std::isfinite(gf.hi)) ? 0.45 * (gf.hi - gf.lo) : 1.0;
        out.sergeraert = sergeraert_criterion(f, gf, span, 64.0, 240).satisfied;
    } catch (const std::exception&) {
        out.sergeraert = false;
    }

    if (compact) {
        ShootingOutcome minus = phi_minus(f, gf, g, gg, a, alpha, opt.solver);
        if (minus.ok) {
            rep.mu = minus.lambda;
            if (minus.map->anchor() == gf.lo) out.deriv_at_lo = minus.lambda;
            else out.deriv_at_hi = minus.lambda;
            double sup = 0.0;
            for (int i = 1; i < 24; ++i) {
                double x = gf.lo + (gf.hi - gf.lo) * i / 24.0;
                sup = std::max(sup, std::abs(plus.map->eval(x) - minus.map->eval(x)));
            }
            rep.agreement = sup;
        } else {
            rep.note += " phi_minus: " + minus.note;
        }
        if (opt.run_shape) {
            ShapeGrid Fa = shape_grid(f, gf, a, opt.shape_points, opt.solver.products);
            ShapeGrid Ga = shape_grid(g, gg, alpha, opt.shape_points, opt.solver.products);
            if (pattern_compare(Fa, Ga, 1e-6) == PatternVerdict::Incompatible) {
                out.shape_status = Status::Fails;
                out.failure = "Shape: F_a and G_alpha have incompatible patterns";
                rep.e_status = out.e_status;
                return out;
            }
        }
    }

    auto nonflat = [](EndKind k) { return k == EndKind::Hyperbolic || k == EndKind::Takens; };
    if (!compact) {
        // half-open machinery: conjugate as soon as the finite end is non-flat
        bool finite_is_lo = std::isfinite(gf.lo);
        EndKind k = finite_is_lo ? lo_kind : hi_kind;
        if (nonflat(k)) {
            out.e_status = Status::Holds;
            rep.note += " E holds through the non-flat normal form at the endpoint.";
        } else {
            out.e_status = Status::Undetermined;
        }
    } else {
        bool both_hyp = lo_kind == EndKind::Hyperbolic && hi_kind == EndKind::Hyperbolic;
        if (both_hyp && opt.run_modulus) {
            try {
                Modulus mf = robbin_modulus(f, gf);
                Modulus mg = robbin_modulus(g, gg);
                ModulusMatch match = modulus_equivalent(mf, mg, 1e-5);
                if (!match.comparable) {
                    out.e_status = Status::Undetermined;
                    rep.note += " moduli not comparable.";
                } else if (match.equivalent) {
                    out.e_status = Status::Holds;
                    rep.note += " Robbin moduli agree.";
                } else {
                    out.e_status = Status::Fails;
                    out.failure = "E: Robbin moduli differ (residual " +
                                  std::to_string(match.residual) + ")";
                }
            } catch (const std::exception& e) {
                out.e_status = Status::Undetermined;
                rep.note += std::string(" modulus failed: ") + e.what();
            }
        } else {
            out.e_status = Status::Undetermined;
            rep.note += " E undetermined on a compact gap with non-hyperbolic ends.";
        }
    }

    if (opt.run_probe && plus.map && out.e_status != Status::Fails) {
        try {
            SmoothnessDiagnostics diag =
                probe_smoothness(*plus.map, opt.probe_order, 0.7, 12, opt.solver.walk_budget);
            rep.smoothness = diag.orders;
            for (const auto& od : diag.orders) {
                if (od.kind == OrderDiagnostic::Kind::PowerBlowup && od.r2 > 0.97 &&
                    od.exponent < -0.2 && out.e_status == Status::Undetermined) {
                    rep.note += " probe found a derivative blowup at the endpoint for this "
                                "solution branch.";
                    break;
                }
            }
        } catch (const std::exception& e) {
            rep.note += std::string(" probe failed: ") + e.what();
        }
    }
    rep.e_status = out.e_status;
    return out;
}

}  // namespace

ConjugacyReport classify(const Diffeo& f, const Diffeo& g, const ClassifyOptions& opt) {
    ConjugacyReport rep;
    auto fail = [&](const std::string& name, const std::string& why) {
        rep.verdict = Verdict::NotConjugate;
        if (rep.first_failure.empty()) rep.first_failure = name + ": " + why;
    };
    auto add_condition = [&](const std::string& name, Status st, const std::string& ev) {
        rep.conditions.push_back({name, st, ev});
    };

    if (f.degree() != g.degree()) {
        fail("Sign", "degrees differ");
        add_condition("Sign", Status::Fails, "degree is a conjugacy invariant");
        return rep;
    }
    if (f.degree() < 0) return reduce_orientation_reversing(f, g, opt);

    VerifyReport vf = f.verify(), vg = g.verify();
    if (!vf.ok || !vg.ok) {
        std::string all;
        for (const auto& v : vf.violations) all += v + "; ";
        for (const auto& v : vg.violations) all += v + "; ";
        throw NumericError("classify: verification failed: " + all);
    }

    Alignment align = align_fixed_sets(f, g);
    if (!align.ok) {
        fail("Sign", align.reason);
        add_condition("Sign", Status::Fails, align.reason);
        return rep;
    }

    SignConditionResult sc = sign_condition(f, g);
    add_condition("Sign", sc.status, sc.detail);
    bool sign_failed = sc.status == Status::Fails;
    if (sign_failed) fail("Sign", sc.detail);
    // the jet conditions are cheap and carry the informative witness
    // (typically the multipliers), so evaluate them even after a sign failure

    // Condition T at every paired fixed point
    std::vector<EndKind> kinds;
    Status t_all = Status::Holds;
    bool t_flat_only = true;
    for (std::size_t i = 0; i < f.fixed_points().size(); ++i) {
        double pf = f.fixed_points()[i];
        double pg = g.fixed_points()[i];
        JetConditionResult jr = jet_condition_T(f.map(), pf, g.map(), pg, opt);
        FixedPointReport fpr;
        fpr.x_f = pf;
        fpr.x_g = pg;
        fpr.mult_f = jr.mult_f;
        fpr.mult_g = jr.mult_g;
        fpr.jet_class_f = jr.class_f;
        fpr.jet_class_g = jr.class_g;
        fpr.t_status = jr.status;
        fpr.note = jr.note;
        rep.fixed_points.push_back(fpr);
        if (!jr.flat_flat) {
            t_all = merge(t_all, jr.status);
            t_flat_only = false;
        }
        if (jr.status == Status::Fails) fail("T", "at fixed point " + std::to_string(pf) + ": " + jr.note);
        kinds.push_back(jr.class_f.rfind("hyperbolic", 0) == 0 ? EndKind::Hyperbolic
                        : jr.class_f.rfind("takens", 0) == 0   ? EndKind::Takens
                                                               : EndKind::Flat);
    }
    if (t_flat_only && !f.fixed_points().empty()) {
        add_condition("T", Status::Undetermined,
                      "all jets flat to the truncation order; no jet obstruction");
    } else {
        add_condition("T", t_all, "truncated jets at the paired fixed points");
    }

    if (sign_failed) return rep;

    // per-gap analyses
    const auto& gaps_f = f.gaps();
    const auto& gaps_g = g.gaps();
    Status p_all = Status::Holds, e_all = Status::Holds, shape_all = Status::Holds;
    std::vector<GapAnalysis> analyses;
    for (std::size_t i = 0; i < gaps_f.size(); ++i) {
        const Gap& gf = gaps_f[i];
        EndKind lo_kind = EndKind::None, hi_kind = EndKind::None;
        for (std::size_t k = 0; k < f.fixed_points().size(); ++k) {
            if (f.fixed_points()[k] == gf.lo) lo_kind = kinds[k];
            if (f.fixed_points()[k] == gf.hi) hi_kind = kinds[k];
        }
        GapAnalysis ga = analyze_gap(f, gf, g, gaps_g[i], lo_kind, hi_kind, opt);
        p_all = merge(p_all, ga.p_status);
        e_all = merge(e_all, ga.e_status);
        shape_all = merge(shape_all, ga.shape_status);
        if (!ga.failure.empty()) {
            auto colon = ga.failure.find(':');
            fail(ga.failure.substr(0, colon), ga.failure.substr(colon + 2));
        }
        analyses.push_back(std::move(ga));
        rep.gaps.push_back(analyses.back().report);
    }
    add_condition("P", p_all, "orbit products per gap");
    add_condition("E", e_all, "endpoint smoothness per gap");
    add_condition("Shape", shape_all, "two-sided shape patterns on compact gaps");

    // interior matching (M1) and the left-to-right chain (M)
    Status m1_all = Status::Holds;
    bool any_interior = false;
    for (std::size_t k = 0; k < f.fixed_points().size(); ++k) {
        double p = f.fixed_points()[k];
        int left = -1, right = -1;
        for (std::size_t i = 0; i < gaps_f.size(); ++i) {
            if (gaps_f[i].hi == p) left = static_cast<int>(i);
            if (gaps_f[i].lo == p) right = static_cast<int>(i);
        }
        if (left < 0 || right < 0) continue;  // interval endpoint
        any_interior = true;
        auto fill = [&](const GapAnalysis& ga, bool end_is_hi) {
            CosetDescriptor c;
            c.kind = kinds[k] == EndKind::Hyperbolic ? CosetDescriptor::Kind::Hyperbolic
                     : kinds[k] == EndKind::Takens   ? CosetDescriptor::Kind::Takens
                                                     : CosetDescriptor::Kind::Flat;
            c.generator = f.derivative(p);
            auto dv = end_is_hi ? ga.deriv_at_hi : ga.deriv_at_lo;
            c.lambda = dv.value_or(std::numeric_limits<double>::quiet_NaN());
            c.connected = ga.sergeraert;
            return c;
        };
        CosetDescriptor cl = fill(analyses[left], true);
        CosetDescriptor cr = fill(analyses[right], false);
        std::string note;
        Status st;
        if (!std::isfinite(cl.lambda) || !std::isfinite(cr.lambda)) {
            st = Status::Undetermined;
            note = "no conjugation derivative available on one side";
        } else {
            st = match_jets(cl, cr, opt.tol_match, &note);
        }
        rep.fixed_points[k].m1_status = st;
        rep.fixed_points[k].note += (rep.fixed_points[k].note.empty() ? "" : "; ") + note;
        m1_all = merge(m1_all, st);
        if (st == Status::Fails) fail("M1", "at fixed point " + std::to_string(p) + ": " + note);
    }
    if (any_interior) add_condition("M1", m1_all, "multiplier cosets at interior fixed points");
    add_condition("M", any_interior ? m1_all : Status::Holds,
                  any_interior ? "left-to-right chain over the interior fixed points"
                               : "no interior fixed points");
    add_condition("F", Status::Holds, "vacuous for finite fixed sets (no accumulation points)");

    if (rep.verdict == Verdict::NotConjugate) return rep;
    Status overall = Status::Holds;
    for (const auto& c : rep.conditions) {
        if (c.name == "T" && c.status == Status::Undetermined) continue;  // flat: no obstruction
        overall = merge(overall, c.status);
    }
    rep.verdict = overall == Status::Holds ? Verdict::Conjugate : Verdict::Undetermined;
    return rep;
}

// ------ orientation-reversing reduction ------ //

namespace {

bool is_identity_on_grid(const Diffeo& d, double tol) {
    double lo = d.domain().lower, hi = d.domain().upper;
    if (!std::isfinite(lo)) lo = -4.0;
    if (!std::isfinite(hi)) hi = 4.0;
    for (int i = 0; i <= 64; ++i) {
        double x = lo + (hi - lo) * i / 64.0;
        if (std::abs(d.eval(x) - x) > tol) return false;
    }
    return true;
}

}  // namespace

ConjugacyReport reduce_orientation_reversing(const Diffeo& f, const Diffeo& g,
                                             const ClassifyOptions& opt) {
    ConjugacyReport rep;
    if (f.fixed_points().size() != 1 || g.fixed_points().size() != 1)
        throw NumericError("an orientation-reversing diffeomorphism fixes exactly one point");
    double pf = f.fixed_points()[0], pg = g.fixed_points()[0];

    auto square_of = [&](const Diffeo& d, double p) {
        std::vector<SmoothMapPtr> chain{d.map_ptr(), d.map_ptr()};
        return Diffeo(std::make_shared<ComposedMap>(chain), d.domain(), {p}, +1);
    };
    Diffeo f2 = square_of(f, pf);
    Diffeo g2 = square_of(g, pg);

    bool f2_id = is_identity_on_grid(f2, 1e-12);
    bool g2_id = is_identity_on_grid(g2, 1e-12);

    FormalSeries sf = series_at(f.map(), pf, opt.series_order, opt.tol_jet);
    bool involutive = is_involutive_jet(sf);

    if (f2_id != g2_id) {
        rep.verdict = Verdict::NotConjugate;
        rep.first_failure = "squares: one square is the identity, the other is not";
        rep.conditions.push_back({"T", Status::Fails, rep.first_failure});
        return rep;
    }
    if (f2_id && g2_id) {
        rep.verdict = Verdict::Conjugate;
        rep.notes.push_back(
            "reversing case: both squares are the identity, so the fixed point is interior to "
            "fix(f^2) and conjugacy of the squares settles the question");
        rep.conditions.push_back({"T", Status::Holds, "squares identical"});
        return rep;
    }

    VerifyReport v2 = f2.verify();
    VerifyReport w2 = g2.verify();
    if (!v2.ok || !w2.ok) {
        rep.verdict = Verdict::Undetermined;
        rep.notes.push_back(
            "reversing case: the squared maps appear to fix undeclared points (period-2 "
            "orbits); outside the finite-fixed-set pipeline");
        return rep;
    }

    rep = classify(f2, g2, opt);
    if (!involutive) {
        rep.notes.push_back(
            "reversing case 1: the jet of f is not involutive, so conjugacy of the squares "
            "settles the question");
        return rep;
    }
    // involutive jet with the fixed point on the boundary of fix(f^2):
    // additionally require equal jets
    bool jets_equal = true;
    {
        Jet jf = f.map().eval_jet(pf, opt.series_order);
        Jet jg = g.map().eval_jet(pg, opt.series_order);
        for (int k = 1; k <= opt.series_order; ++k)
            if (std::abs(jf[k] - jg[k]) > 100 * opt.tol_match * std::max(1.0, std::abs(jf[k])))
                jets_equal = false;
    }
    rep.notes.push_back("reversing case 3: involutive jet on the boundary of fix(f^2); "
                        "requiring equal jets in addition to conjugate squares");
    if (!jets_equal) {
        rep.verdict = Verdict::NotConjugate;
        rep.first_failure = "T: the involutive boundary case needs identical jets";
    }
    return rep;
}

}  // namespace ivd
