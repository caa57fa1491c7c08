#include "ivd/diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ivd/errors.hpp"

namespace ivd {

std::string Interval::str() const {
    std::ostringstream os;
    os << (lower_closed ? '[' : '(');
    if (std::isinf(lower)) os << "-inf"; else os << lower;
    os << ", ";
    if (std::isinf(upper)) os << "inf"; else os << upper;
    os << (upper_closed ? ']' : ')');
    return os.str();
}

bool Gap::compact() const { return std::isfinite(lo) && std::isfinite(hi) && lo_fixed && hi_fixed; }

std::string status_str(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        default: return "undetermined";
    }
}

Diffeo::Diffeo(SmoothMapPtr map, Interval domain, std::vector<double> fixed_points, int degree)
    : map_(std::move(map)), domain_(domain), fixed_(std::move(fixed_points)), degree_(degree) {
    std::sort(fixed_.begin(), fixed_.end());
    if (degree_ != +1 && degree_ != -1) throw NumericError("degree must be +1 or -1");
    build_gaps();
}

Diffeo Diffeo::from_expr(const std::string& expr, Interval domain,
                         std::vector<double> fixed_points, int degree) {
    return Diffeo(make_expr(expr), domain, std::move(fixed_points), degree);
}

void Diffeo::build_gaps() {
    gaps_.clear();
    if (degree_ < 0) return;  // reversing maps are handled through their squares
    std::vector<double> cuts;
    cuts.push_back(domain_.lower);
    for (double p : fixed_) cuts.push_back(p);
    cuts.push_back(domain_.upper);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i] < cuts[i + 1])) continue;
        Gap g;
        g.lo = cuts[i];
        g.hi = cuts[i + 1];
        g.lo_fixed = std::isfinite(g.lo) &&
                     (std::binary_search(fixed_.begin(), fixed_.end(), g.lo) ||
                      (g.lo == domain_.lower && domain_.lower_closed));
        g.hi_fixed = std::isfinite(g.hi) &&
                     (std::binary_search(fixed_.begin(), fixed_.end(), g.hi) ||
                      (g.hi == domain_.upper && domain_.upper_closed));
        g.cls = classify_gap(*this, g);
        gaps_.push_back(g);
    }
}

SemigroupClass classify_gap(const Diffeo& d, const Gap& gap) {
    // probe the displacement sign at interior points (it can underflow to
    // zero near flat fixed points, so probe several)
    double lo = gap.lo, hi = gap.hi;
    for (int i = 1; i <= 15; ++i) {
        double x;
        if (std::isfinite(lo) && std::isfinite(hi)) x = lo + (hi - lo) * i / 16.0;
        else if (std::isfinite(lo)) x = lo + i;
        else if (std::isfinite(hi)) x = hi - i;
        else x = -8.0 + i;
        double disp = d.eval(x) - x;
        if (disp > 0) return SemigroupClass::SPlus;
        if (disp < 0) return SemigroupClass::SMinus;
    }
    throw NumericError("gap displacement is numerically zero everywhere; cannot classify");
}

double Diffeo::inverse(double y) const {
    return invert_monotone(*map_, y, domain_.lower, domain_.upper);
}

double Diffeo::iterate(double x, long long n) const {
    double v = x;
    if (n >= 0) {
        for (long long i = 0; i < n; ++i) v = eval(v);
    } else {
        for (long long i = 0; i < -n; ++i) v = inverse(v);
    }
    return v;
}

const Gap* Diffeo::gap_containing(double x) const {
    for (const Gap& g : gaps_)
        if (g.contains(x)) return &g;
    return nullptr;
}

VerifyReport Diffeo::verify(int grid_size) const {
    VerifyReport rep;
    auto fail = [&](const std::string& m) {
        rep.ok = false;
        rep.violations.push_back(m);
    };

    // verification window: finite ends kept, infinite ends truncated
    double lo = domain_.lower, hi = domain_.upper;
    double span_ref = 1.0;
    if (std::isfinite(lo) && std::isfinite(hi)) span_ref = hi - lo;
    if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 8.0 : -8.0;
    if (!std::isfinite(hi)) hi = lo + 8.0;
    const double tol_fix = 1e-9 * std::max(1.0, span_ref);

    // declared fixed points must be fixed
    for (double p : fixed_) {
        if (!domain_.contains(p)) {
            fail("declared fixed point outside the domain");
            continue;
        }
        if (std::abs(eval(p) - p) > tol_fix) {
            std::ostringstream os;
            os << "declared fixed point " << p << " is not fixed: f(p)-p = " << eval(p) - p;
            fail(os.str());
        }
    }
    if (degree_ > 0) {
        if (domain_.lower_closed && std::abs(eval(domain_.lower) - domain_.lower) > tol_fix)
            fail("included lower endpoint is not fixed");
        if (domain_.upper_closed && std::abs(eval(domain_.upper) - domain_.upper) > tol_fix)
            fail("included upper endpoint is not fixed");
    }

    // monotonicity and sign changes of f - x on the grid
    double prev_x = lo, prev_v = eval(lo);
    double prev_disp = prev_v - prev_x;
    for (int i = 1; i <= grid_size; ++i) {
        double x = lo + (hi - lo) * i / grid_size;
        double v = eval(x);
        if (degree_ > 0 ? v <= prev_v : v >= prev_v) {
            std::ostringstream os;
            os << "monotonicity violation near x = " << x;
            fail(os.str());
            break;
        }
        double disp = v - x;
        if (degree_ > 0 && prev_disp * disp < 0) {
            // a sign change must bracket a declared fixed point
            bool declared = false;
            for (double p : fixed_)
                if (p >= prev_x && p <= x) declared = true;
            if (!declared) {
                std::ostringstream os;
                os << "undeclared fixed point suspected in [" << prev_x << ", " << x << "]";
                fail(os.str());
            }
        }
        prev_x = x;
        prev_v = v;
        prev_disp = disp;
    }
    return rep;
}

OrbitCount Diffeo::orbit_count(double x_lo, double x_hi, double seed, long long budget) const {
    OrbitCount out;
    if (!(x_lo < x_hi)) throw NumericError("orbit_count: empty window");
    const Gap* g = gap_containing(seed);
    if (!g) throw NumericError("orbit_count: seed is not inside a gap");
    bool down = g->cls == SemigroupClass::SMinus;

    auto in_window = [&](double x) { return x >= x_lo && x <= x_hi; };

    // forward sweep from the seed
    double x = seed;
    long long used = 0;
    while (used < budget) {
        if (in_window(x)) ++out.count;
        if (down ? x < x_lo : x > x_hi) break;  // passed the window
        double nx = eval(x);
        if (nx == x) { out.stalled = true; break; }
        x = nx;
        ++used;
    }
    if (used >= budget) out.budget_exceeded = true;

    // backward sweep (exclude the seed itself, already counted)
    x = seed;
    while (used < budget) {
        if (down ? x > x_hi : x < x_lo) break;
        double nx = inverse(x);
        if (nx == x) { out.stalled = true; break; }
        x = nx;
        ++used;
        if (in_window(x)) ++out.count;
    }
    if (used >= budget) out.budget_exceeded = true;
    return out;
}

Diffeo Diffeo::restricted(const Gap& g) const {
    Interval iv;
    iv.lower = g.lo;
    iv.upper = g.hi;
    iv.lower_closed = g.lo_fixed;
    iv.upper_closed = g.hi_fixed;
    std::vector<double> fixed;
    if (g.lo_fixed) fixed.push_back(g.lo);
    if (g.hi_fixed) fixed.push_back(g.hi);
    return Diffeo(map_, iv, fixed, +1);
}

SignConditionResult sign_condition(const Diffeo& f, const Diffeo& g) {
    SignConditionResult res;
    const auto& gf = f.gaps();
    const auto& gg = g.gaps();
    if (gf.size() != gg.size()) {
        res.status = Status::Fails;
        res.detail = "gap decompositions have different sizes";
        return res;
    }
    for (std::size_t i = 0; i < gf.size(); ++i) {
        if (gf[i].cls != gg[i].cls) {
            res.status = Status::Fails;
            double w;
            if (std::isfinite(gf[i].lo) && std::isfinite(gf[i].hi))
                w = 0.5 * (gf[i].lo + gf[i].hi);
            else if (std::isfinite(gf[i].lo)) w = gf[i].lo + 1.0;
            else if (std::isfinite(gf[i].hi)) w = gf[i].hi - 1.0;
            else w = 0.0;
            res.witness_x = w;
            std::ostringstream os;
            os << "graphs lie on opposite sides of the diagonal on gap " << i;
            res.detail = os.str();
            return res;
        }
    }
    return res;
}

double Alignment::operator()(double x) const {
    if (knots_x.empty()) return x;
    if (knots_x.size() == 1) return x + (knots_y[0] - knots_x[0]);
    // monotone piecewise-linear through the knots, identity-slope tails
    if (x <= knots_x.front()) return knots_y.front() + (x - knots_x.front());
    if (x >= knots_x.back()) return knots_y.back() + (x - knots_x.back());
    auto it = std::upper_bound(knots_x.begin(), knots_x.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots_x.begin()) - 1;
    double t = (x - knots_x[i]) / (knots_x[i + 1] - knots_x[i]);
    return knots_y[i] + t * (knots_y[i + 1] - knots_y[i]);
}

Alignment align_fixed_sets(const Diffeo& f, const Diffeo& g) {
    Alignment a;
    const auto& pf = f.fixed_points();
    const auto& pg = g.fixed_points();
    if (pf.size() != pg.size()) {
        a.ok = false;
        a.reason = "fixed sets have different cardinality";
        return a;
    }
    a.ok = true;
    for (std::size_t i = 0; i < pf.size(); ++i) {
        a.pairs.emplace_back(pf[i], pg[i]);
        a.knots_x.push_back(pf[i]);
        a.knots_y.push_back(pg[i]);
    }
    return a;
}

}  // namespace ivd
