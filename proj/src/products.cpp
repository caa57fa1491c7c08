#include "ivd/products.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ivd/errors.hpp"

namespace ivd {

GapView view_toward(const Diffeo& f, const Gap& gap, double endpoint) {
    if (!std::isfinite(endpoint)) throw NumericError("gap view requires a finite endpoint");
    GapView v;
    v.target = endpoint;
    v.other = (endpoint == gap.lo) ? gap.hi : gap.lo;
    bool toward_d = (endpoint == gap.d());
    if (toward_d) {
        v.fwd = f.map_ptr();
        v.used_inverse = false;
    } else {
        v.fwd = make_inverse(f.map_ptr(), gap.lo, gap.hi);
        v.used_inverse = true;
    }
    return v;
}

GapView view_toward_d(const Diffeo& f, const Gap& gap) {
    if (!std::isfinite(gap.d()))
        throw NumericError("forward limit of the gap is infinite; analyze the inverse end");
    return view_toward(f, gap, gap.d());
}

GapView view_toward_c(const Diffeo& f, const Gap& gap) {
    if (!std::isfinite(gap.c()))
        throw NumericError("backward limit of the gap is infinite; analyze the forward end");
    return view_toward(f, gap, gap.c());
}

namespace {

const Gap& gap_of(const Diffeo& f, double x, const char* who) {
    const Gap* g = f.gap_containing(x);
    if (!g) throw NumericError(std::string(who) + ": point is not interior to a gap");
    return *g;
}

}  // namespace

ProductResult h1(const Diffeo& f, const Diffeo& g, double x, double xi,
                 const ProductOptions& opt) {
    const Gap& gf = gap_of(f, x, "h1");
    const Gap& gg = gap_of(g, xi, "h1");
    GapView vf = view_toward_d(f, gf);
    GapView vg = view_toward_d(g, gg);
    return paired_log_product(vf.side(), x, vg.side(), xi, opt);
}

ProductResult h2(const Diffeo& f, const Diffeo& g, double x, double xi,
                 const ProductOptions& opt) {
    const Gap& gf = gap_of(f, x, "h2");
    const Gap& gg = gap_of(g, xi, "h2");
    GapView vf = view_toward_c(f, gf);
    GapView vg = view_toward_c(g, gg);
    // By the chain rule prod_{n>=0} (f^{-1})'((f^{-1})^n x) telescopes into
    // prod_{m>=1} 1/f'(f^{-m} x), so running the engine on the inverse maps
    // from (x, xi) is exactly H2 = prod_{n>=1} g'(g^{-n} xi)/f'(f^{-n} x).
    return paired_log_product(vf.side(), x, vg.side(), xi, opt);
}

ProductResult h_two_sided(const Diffeo& f, const Diffeo& g, double x, double xi,
                          const ProductOptions& opt) {
    ProductResult fwd = h1(f, g, x, xi, opt);
    if (fwd.status == ProductStatus::Diverged) return fwd;
    ProductResult bwd = h2(f, g, x, xi, opt);
    ProductResult out;
    out.terms_used = fwd.terms_used + bwd.terms_used;
    out.tail_bound = fwd.tail_bound + bwd.tail_bound;
    if (bwd.status == ProductStatus::Diverged) {
        out.status = ProductStatus::Diverged;
        out.note = "backward product diverges";
        return out;
    }
    out.log_value = fwd.log_value - bwd.log_value;
    out.value = std::exp(out.log_value);
    out.status = (fwd.status == ProductStatus::Converged && bwd.status == ProductStatus::Converged)
                     ? ProductStatus::Converged
                     : ProductStatus::Undetermined;
    if (out.status == ProductStatus::Undetermined)
        out.note = fwd.status != ProductStatus::Converged ? fwd.note : bwd.note;
    return out;
}

ConditionPResult condition_p(const Diffeo& f, const Gap& gf, const Diffeo& g,
                             const Gap& gg, double a, double alpha,
                             const ProductOptions& opt) {
    ConditionPResult res;
    if (gf.cls != gg.cls) {
        res.status = Status::Fails;
        res.note = "gaps lie in different semigroups";
        return res;
    }
    const bool compact = gf.compact() && gg.compact();
    if (compact) {
        GapView vfd = view_toward_d(f, gf), vgd = view_toward_d(g, gg);
        res.forward = paired_log_product(vfd.side(), a, vgd.side(), alpha, opt);
        GapView vfc = view_toward_c(f, gf), vgc = view_toward_c(g, gg);
        res.backward = paired_log_product(vfc.side(), a, vgc.side(), alpha, opt);
        if (res.forward.status == ProductStatus::Diverged ||
            res.backward->status == ProductStatus::Diverged) {
            res.status = Status::Fails;
            res.note = "two-sided product diverges";
        } else if (res.forward.status == ProductStatus::Converged &&
                   res.backward->status == ProductStatus::Converged) {
            res.status = Status::Holds;
        } else {
            res.status = Status::Undetermined;
            res.note = "product did not settle within budget";
        }
        return res;
    }
    // half-open machinery anchored at the finite end
    double pf = std::isfinite(gf.d()) ? gf.d() : gf.c();
    double pg = std::isfinite(gg.d()) ? gg.d() : gg.c();
    if (!std::isfinite(pf) || !std::isfinite(pg)) {
        // no finite endpoint at all: fixed-point-free case, no product condition
        res.status = Status::Holds;
        res.note = "open gap: no product condition";
        return res;
    }
    GapView vf = view_toward(f, gf, pf);
    GapView vg = view_toward(g, gg, pg);
    res.forward = paired_log_product(vf.side(), a, vg.side(), alpha, opt);
    switch (res.forward.status) {
        case ProductStatus::Converged: res.status = Status::Holds; break;
        case ProductStatus::Diverged: res.status = Status::Fails; break;
        default:
            res.status = Status::Undetermined;
            res.note = res.forward.note;
            break;
    }
    return res;
}

// ------ shape functions ------ //

namespace {

double log_two_sided_self(const GapView& vd, const GapView& vc, double x, double a,
                          const ProductOptions& opt, bool& converged) {
    ProductResult fwd = paired_log_product(vd.side(), x, vd.side(), a, opt);
    ProductResult bwd = paired_log_product(vc.side(), x, vc.side(), a, opt);
    converged = fwd.status == ProductStatus::Converged && bwd.status == ProductStatus::Converged;
    // F_a = H1(f,f;x,a) / H2(f,f;x,a)
    return fwd.log_value - bwd.log_value;
}

}  // namespace

ShapeGrid shape_grid(const Diffeo& f, const Gap& gap, double a, int points,
                     const ProductOptions& opt, Exec exec) {
    if (!gap.compact()) throw NumericError("shape_grid requires a compact gap");
    if (!gap.contains(a)) throw NumericError("shape_grid: base point outside the gap");
    ShapeGrid grid;
    grid.gap = gap;
    grid.a = a;
    grid.fprime_c = f.derivative(gap.c());
    grid.fprime_d = f.derivative(gap.d());
    double fa = f.eval(a);
    double lo = std::min(fa, a), hi = std::max(fa, a);
    grid.xs.resize(points);
    grid.values.resize(points);
    for (int i = 0; i < points; ++i)
        grid.xs[i] = lo + (hi - lo) * i / (points - 1);

    GapView vd = view_toward_d(f, gap);
    GapView vc = view_toward_c(f, gap);
    std::vector<char> ok(points, 1);

    auto kernel = [&](int i) {
        bool conv = true;
        double lf = log_two_sided_self(vd, vc, grid.xs[i], a, opt, conv);
        grid.values[i] = std::exp(lf);
        ok[i] = conv ? 1 : 0;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < points; ++i) kernel(i);
    } else {
        for (int i = 0; i < points; ++i) kernel(i);
    }
    grid.all_converged = std::all_of(ok.begin(), ok.end(), [](char c) { return c == 1; });
    return grid;
}

ShapeCheckResult shape_check(const Diffeo& f, const Diffeo& g, const Gap& gf,
                             const std::function<double(double)>& h, int points,
                             double tol, const ProductOptions& opt, Exec exec) {
    if (!gf.compact()) throw NumericError("shape_check requires a compact gap");
    ShapeCheckResult res;
    const Gap* gg = g.gap_containing(h(0.5 * (gf.lo + gf.hi)));
    if (!gg) throw NumericError("shape_check: candidate map leaves the target gap");
    GapView vfd = view_toward_d(f, gf), vfc = view_toward_c(f, gf);
    GapView vgd = view_toward_d(g, *gg), vgc = view_toward_c(g, *gg);

    // one fundamental domain suffices: the value repeats along orbits
    double a = 0.5 * (gf.lo + gf.hi);
    double fa = f.eval(a);
    double lo = std::min(fa, a), hi = std::max(fa, a);
    std::vector<double> xs(points), vals(points);
    for (int i = 0; i < points; ++i)
        xs[i] = lo + (hi - lo) * (i + 0.5) / points;

    auto kernel = [&](int i) {
        double x = xs[i], y = h(x);
        ProductResult fwd = paired_log_product(vfd.side(), x, vgd.side(), y, opt);
        ProductResult bwd = paired_log_product(vfc.side(), x, vgc.side(), y, opt);
        vals[i] = fwd.log_value - bwd.log_value;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < points; ++i) kernel(i);
    } else {
        for (int i = 0; i < points; ++i) kernel(i);
    }

    auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    res.spread = *mx - *mn;
    double mid = 0.5 * (*mx + *mn);
    res.constant = std::exp(mid);
    if (res.spread > tol) {
        res.status = Status::Fails;
        res.witness = std::make_pair(xs[mn - vals.begin()], xs[mx - vals.begin()]);
    }
    return res;
}

ShapePattern classify_pattern(const ShapeGrid& grid, double tol) {
    ShapePattern p;
    const auto& v = grid.values;
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (hi - lo <= tol * std::max(1.0, std::abs(hi))) {
        p.constant = true;
        return p;
    }
    // interior extrema from sign changes of increments, with a noise floor
    double floor = tol * std::max(1.0, hi - lo);
    int last_sign = 0;
    double ref = v.front();
    for (std::size_t i = 1; i < v.size(); ++i) {
        double dv = v[i] - ref;
        if (std::abs(dv) < floor) continue;
        int s = dv > 0 ? +1 : -1;
        if (last_sign != 0 && s != last_sign) p.extrema.push_back(last_sign);
        last_sign = s;
        ref = v[i];
    }
    if (p.extrema.empty()) {
        p.monotone = true;
        p.direction = last_sign;
    }
    return p;
}

PatternVerdict pattern_compare(const ShapeGrid& Fa, const ShapeGrid& Galpha, double tol) {
    ShapePattern pf = classify_pattern(Fa, tol);
    ShapePattern pg = classify_pattern(Galpha, tol);
    if (pf.constant != pg.constant) return PatternVerdict::Incompatible;
    if (pf.constant) return PatternVerdict::Compatible;
    if (pf.monotone != pg.monotone) return PatternVerdict::Incompatible;
    if (pf.monotone) {
        return pf.direction == pg.direction ? PatternVerdict::Compatible
                                            : PatternVerdict::Incompatible;
    }
    return pf.extrema == pg.extrema ? PatternVerdict::Compatible : PatternVerdict::Incompatible;
}

}  // namespace ivd
