#include "ivd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ivd/errors.hpp"

namespace ivd {

namespace {

constexpr double kNoise = 2.220446049250313e-16;

// One Newton-polished inverse solve with a warm initial guess; falls back to
// bracketed solving when the guess is bad.
double inverse_step(const SmoothMap& m, double y, double guess, double lo, double hi) {
    double z = guess;
    if (!std::isfinite(z)) z = y;
    for (int it = 0; it < 60; ++it) {
        double v, d1;
        m.eval_d1(z, v, d1);
        if (!(d1 != 0.0) || !std::isfinite(v)) break;
        double dz = (v - y) / d1;
        double zn = z - dz;
        if (std::isfinite(lo) && zn < lo) break;
        if (std::isfinite(hi) && zn > hi) break;
        z = zn;
        if (std::abs(dz) <= 2.0 * kNoise * (std::abs(z) + 1e-300)) return z;
    }
    return invert_monotone(m, y, lo, hi);
}

// Applies a gap view's forward map along an orbit; when the map is a wrapped
// inverse, the underlying solves reuse the previous point as a warm guess.
struct WarmFwd {
    const SmoothMap* inner = nullptr;  // solve inner(z) = x when set
    const SmoothMap* plain = nullptr;
    double lo = 0, hi = 0;
    double guess = std::numeric_limits<double>::quiet_NaN();

    explicit WarmFwd(const GapView& v) {
        lo = std::min(v.target, v.other);
        hi = std::max(v.target, v.other);
        if (auto* im = dynamic_cast<const InverseMap*>(v.fwd.get())) inner = im->inner().get();
        else plain = v.fwd.get();
    }
    double step(double x) {
        if (!inner) return plain->eval(x);
        double z = inverse_step(*inner, x, std::isfinite(guess) ? guess : x, lo, hi);
        guess = 2 * z - x;
        return z;
    }
};

// backward step of a view (the inverse of fwd), warm-started
struct WarmBwd {
    const SmoothMap* fwd = nullptr;
    const SmoothMap* collapsed = nullptr;  // inner of a wrapped inverse: direct eval
    double lo = 0, hi = 0;
    double guess = std::numeric_limits<double>::quiet_NaN();

    explicit WarmBwd(const GapView& v) {
        lo = std::min(v.target, v.other);
        hi = std::max(v.target, v.other);
        if (auto* im = dynamic_cast<const InverseMap*>(v.fwd.get())) collapsed = im->inner().get();
        else fwd = v.fwd.get();
    }
    double step(double y) {
        if (collapsed) return collapsed->eval(y);
        double z = inverse_step(*fwd, y, std::isfinite(guess) ? guess : y, lo, hi);
        guess = 2 * z - y;
        return z;
    }
};

}  // namespace

// ------ D1 field ------ //

double D1Field::Grid::eval(double t) const {
    if (t >= lo && t <= hi) return interp(t);
    double adj = 0.0;
    double cur = t;
    const double d = view.target;
    const double grid_dist = std::min(std::abs(lo - d), std::abs(hi - d));
    const double gaplo = std::min(view.target, view.other);
    const double gaphi = std::max(view.target, view.other);
    for (int guard = 0; guard < 100000; ++guard) {
        if (cur >= lo && cur <= hi) return interp(cur) + adj;
        if (std::abs(cur - d) < grid_dist) {
            // between the grid and d: one step away from d.
            // F(fwd(t)) = F(t) fwd'(d)/fwd'(t)  =>  F(cur) = F(prev) + logm - log fwd'(prev)
            double prev = invert_monotone(*view.fwd, cur, gaplo, gaphi);
            adj += log_mult - std::log(view.fwd->derivative(prev));
            cur = prev;
        } else {
            adj += std::log(view.fwd->derivative(cur)) - log_mult;
            cur = view.fwd->eval(cur);
        }
    }
    throw NumericError("product grid telescoping did not reach the grid");
}

D1Field::Grid D1Field::build_grid(const GapView& v, double base, double lo, double hi,
                                  const SolverOptions& opt) {
    Grid g;
    g.view = v;
    g.lo = lo;
    g.hi = hi;
    g.log_mult = std::log(v.fwd->derivative(v.target));
    const int n = std::max(opt.field_grid, 48);
    std::vector<double> xs(n), vals(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    OrbitSide side_point = v.side();
    std::vector<std::string> errors(n);

    auto kernel = [&](int i) {
        try {
            ProductResult r = paired_log_product(side_point, xs[i], side_point, base, opt.products);
            vals[i] = r.log_value;
            if (r.status == ProductStatus::Diverged) errors[i] = "grid product diverged";
            else if (r.status != ProductStatus::Converged)
                errors[i] = "grid product undetermined: " + r.note;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (opt.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) kernel(i);
    } else {
        for (int i = 0; i < n; ++i) kernel(i);
    }
    for (int i = 0; i < n; ++i)
        if (!errors[i].empty()) throw NumericError("product field: " + errors[i]);

    // node slopes by 4th-order differences (lower order at the edges)
    std::vector<double> slopes(n);
    double h = xs[1] - xs[0];
    for (int i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n)
            slopes[i] = (-vals[i + 2] + 8 * vals[i + 1] - 8 * vals[i - 1] + vals[i - 2]) / (12 * h);
        else if (i == 0)
            slopes[i] = (-3 * vals[0] + 4 * vals[1] - vals[2]) / (2 * h);
        else if (i == n - 1)
            slopes[i] = (3 * vals[n - 1] - 4 * vals[n - 2] + vals[n - 3]) / (2 * h);
        else
            slopes[i] = (vals[i + 1] - vals[i - 1]) / (2 * h);
    }
    g.interp = CubicInterpolant::hermite(std::move(xs), std::move(vals), std::move(slopes));
    return g;
}

D1Field::D1Field(GapView fv, GapView gv, double a, double alpha, const SolverOptions& opt,
                 bool same_map)
    : fv_(std::move(fv)), gv_(std::move(gv)), a_(a), alpha_(alpha), same_map_(same_map) {
    try {
        fa_ = fv_.fwd->eval(a_);
        galpha_ = gv_.fwd->eval(alpha_);
        if (fa_ == a_ || galpha_ == alpha_)
            throw NumericError("fundamental domain collapsed at double resolution");

        if (!same_map_) {
            OrbitSide sf = fv_.side();
            OrbitSide sg = gv_.side();
            base_ = paired_log_product(sf, a_, sg, alpha_, opt.products);
            if (base_.status == ProductStatus::Diverged) {
                note_ = "base product diverges (condition P fails at the base pair)";
                return;
            }
            if (base_.status != ProductStatus::Converged) {
                note_ = "base product undetermined: " + base_.note;
                return;
            }
        }

        double flo = std::min(a_, fa_), fhi = std::max(a_, fa_);
        double margin = 0.02 * (fhi - flo);
        F_ = build_grid(fv_, a_, flo - margin, fhi + margin, opt);
        if (!same_map_) {
            // cover a few g-steps beyond g(alpha); the telescoped extension
            // handles wandering trial solutions outside this range
            double g3 = gv_.fwd->eval(gv_.fwd->eval(galpha_));
            double glo = std::min(g3, alpha_), ghi = std::max(g3, alpha_);
            double gm = 0.02 * (ghi - glo);
            G_ = build_grid(gv_, alpha_, glo - gm, ghi + gm, opt);
        }
        ok_ = true;
    } catch (const std::exception& e) {
        ok_ = false;
        note_ = e.what();
    }
}

void D1Field::rebase_alpha(double alpha) {
    if (!same_map_) throw NumericError("rebase_alpha is only available for self-pairs");
    alpha_ = alpha;
    galpha_ = gv_.fwd->eval(alpha_);
}

double D1Field::log_h1(double x, double xi) const {
    if (same_map_) return F_.eval(x) - F_.eval(xi);
    return base_.log_value + F_.eval(x) - G_.eval(xi);
}

double D1Field::rhs(double lambda, double x, double phi) const {
    return lambda * std::exp(log_h1(x, phi));
}

// ------ scalar adaptive RK45 (Dormand-Prince) ------ //

namespace {

struct OdeTrace {
    bool completed = false;
    double y_end = 0.0;
    std::vector<double> xs, ys, dys;
};

template <class RHS, class Inside>
OdeTrace rk45(const RHS& rhs, double x0, double y0, double x1, double rel_tol,
              const Inside& inside, double max_step, bool collect) {
    OdeTrace out;
    double dir = (x1 > x0) ? 1.0 : -1.0;
    double span = std::abs(x1 - x0);
    double h = dir * std::min(span / 64.0, max_step);
    double x = x0, y = y0;
    double scale_y = std::abs(y0) + span;
    if (collect) {
        out.xs.push_back(x);
        out.ys.push_back(y);
        out.dys.push_back(rhs(x, y));
    }
    int rejects = 0;
    for (long long step = 0; step < 2000000; ++step) {
        if ((x1 - x) * dir <= 0) break;
        if (std::abs(h) > std::abs(x1 - x)) h = x1 - x;
        if (std::abs(h) > max_step) h = dir * max_step;

        double k1 = rhs(x, y);
        double k2 = rhs(x + h / 5.0, y + h * (k1 / 5.0));
        double k3 = rhs(x + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        double k4 = rhs(x + 4.0 * h / 5.0,
                        y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        double k5 = rhs(x + 8.0 * h / 9.0,
                        y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        double k6 = rhs(x + h, y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                        46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                        5103.0 / 18656.0 * k5));
        double y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                             2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        double k7 = rhs(x + h, y5);
        double y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4 -
                             92097.0 / 339200.0 * k5 + 187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
        double err = std::abs(y5 - y4) / (1e-300 + rel_tol * (scale_y + std::abs(y5)));
        if (err <= 1.0 || rejects > 24) {
            x += h;
            y = y5;
            if (!inside(y)) {
                out.y_end = y;
                return out;  // left the admissible strip
            }
            if (collect) {
                out.xs.push_back(x);
                out.ys.push_back(y);
                out.dys.push_back(k7);
            }
            rejects = 0;
        } else {
            ++rejects;
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (std::abs(h) < 1e-18 * span) {
            out.y_end = y;
            return out;
        }
    }
    out.completed = true;
    out.y_end = y;
    return out;
}

struct ShootContext {
    const D1Field& field;
    const SolverOptions& opt;
    double glo, ghi;  // admissible open strip for phi

    double mismatch(double lambda, OdeTrace* trace = nullptr, double max_step = 1e18) const {
        double pad = 1e-10 * std::abs(field.galpha() - field.alpha());
        double clo = glo + pad;
        double chi_ = std::isfinite(ghi) ? ghi - pad : std::numeric_limits<double>::max();
        auto rhs = [&](double x, double y) {
            double yy = std::clamp(y, clo, chi_);
            return field.rhs(lambda, x, yy);
        };
        auto inside = [&](double y) { return y > glo && y < ghi; };
        OdeTrace tr = rk45(rhs, field.a(), field.alpha(), field.fa(), opt.ode_rel_tol, inside,
                           max_step, trace != nullptr);
        double end = tr.completed ? tr.y_end : std::clamp(tr.y_end, glo, ghi);
        if (trace) *trace = std::move(tr);
        return end - field.galpha();
    }
};

}  // namespace

// ------ ConjugacyMap ------ //

struct SolverAccess {
    static void init(ConjugacyMap& m, const D1Field& field, OdeTrace&& tr, double lambda,
                     const SolverOptions& opt);
};

double ConjugacyMap::eval(double x) const {
    double lo = core_.x_min(), hi = core_.x_max();
    if (x >= lo && x <= hi) return core_(x);
    double nearest = (std::abs(lo - d_f_) < std::abs(hi - d_f_)) ? lo : hi;
    bool toward_d = std::abs(x - d_f_) < std::abs(nearest - d_f_);
    if (toward_d) {
        // climb with the f-inverse into the sampled domain, push the value
        // back down with g: phi(x) = g^n(phi0(f^{-n}(x)))
        WarmBwd back(fv_);
        double z = x;
        long long n = 0;
        while (!(z >= lo && z <= hi)) {
            double nz = back.step(z);
            if (nz == z || ++n > walk_budget_)
                throw NumericError("conjugacy-map extension exceeded the orbit budget");
            z = nz;
        }
        double y = core_(z);
        WarmFwd gfwd(gv_);
        for (long long i = 0; i < n; ++i) y = gfwd.step(y);
        return y;
    }
    // descend with f into the domain, climb the value with the g-inverse
    WarmFwd ffwd(fv_);
    double z = x;
    long long n = 0;
    while (!(z >= lo && z <= hi)) {
        double nz = ffwd.step(z);
        if (nz == z || ++n > walk_budget_)
            throw NumericError("conjugacy-map extension exceeded the orbit budget");
        z = nz;
    }
    double y = core_(z);
    WarmBwd gback(gv_);
    for (long long i = 0; i < n; ++i) y = gback.step(y);
    return y;
}

double ConjugacyMap::derivative(double x) const {
    double lo = core_.x_min(), hi = core_.x_max();
    if (x >= lo && x <= hi) return core_.derivative(x);
    double nearest = (std::abs(lo - d_f_) < std::abs(hi - d_f_)) ? lo : hi;
    bool toward_d = std::abs(x - d_f_) < std::abs(nearest - d_f_);
    double deriv = 1.0;
    if (toward_d) {
        WarmBwd back(fv_);
        double z = x;
        long long n = 0;
        while (!(z >= lo && z <= hi)) {
            double nz = back.step(z);
            if (nz == z || ++n > walk_budget_)
                throw NumericError("conjugacy-map extension exceeded the orbit budget");
            deriv /= fv_.fwd->derivative(nz);
            z = nz;
        }
        deriv *= core_.derivative(z);
        double y = core_(z);
        WarmFwd gfwd(gv_);
        for (long long i = 0; i < n; ++i) {
            deriv *= gv_.fwd->derivative(y);
            y = gfwd.step(y);
        }
        return deriv;
    }
    WarmFwd ffwd(fv_);
    double z = x;
    long long n = 0;
    while (!(z >= lo && z <= hi)) {
        deriv *= fv_.fwd->derivative(z);
        double nz = ffwd.step(z);
        if (nz == z || ++n > walk_budget_)
            throw NumericError("conjugacy-map extension exceeded the orbit budget");
        z = nz;
    }
    deriv *= core_.derivative(z);
    double y = core_(z);
    WarmBwd gback(gv_);
    for (long long i = 0; i < n; ++i) {
        double py = gback.step(y);
        deriv /= gv_.fwd->derivative(py);
        y = py;
    }
    return deriv;
}

double ConjugacyMap::verify_residual(int samples, int domains) const {
    double sup = 0.0;
    double left = a_;
    int per = std::max(1, samples / std::max(1, domains));
    for (int k = 0; k < domains; ++k) {
        double right = fv_.fwd->eval(left);
        if (right == left) break;
        for (int i = 0; i < per; ++i) {
            double x = left + (right - left) * (i + 0.3) / per;
            double u = std::abs(gv_.fwd->eval(eval(x)) - eval(fv_.fwd->eval(x)));
            sup = std::max(sup, u);
        }
        left = right;
    }
    return sup;
}

void SolverAccess::init(ConjugacyMap& m, const D1Field& field, OdeTrace&& tr, double lambda,
                        const SolverOptions& opt) {
    std::vector<double> xs = std::move(tr.xs), ys = std::move(tr.ys), ds = std::move(tr.dys);
    if (xs.size() >= 2 && xs.front() > xs.back()) {
        std::reverse(xs.begin(), xs.end());
        std::reverse(ys.begin(), ys.end());
        std::reverse(ds.begin(), ds.end());
    }
    m.core_ = CubicInterpolant::hermite(std::move(xs), std::move(ys), std::move(ds));
    m.fv_ = field.fview();
    m.gv_ = field.gview();
    m.d_f_ = field.fview().target;
    m.d_g_ = field.gview().target;
    m.a_ = field.a();
    m.alpha_ = field.alpha();
    m.lambda_ = lambda;
    m.walk_budget_ = opt.walk_budget;
    m.residual_ = m.verify_residual(120, 3);

    // mandatory self-check: direct continuation one domain further must agree
    // with the functional-equation extension
    double overlap = 0.0;
    try {
        double fa = field.fa();
        double ffa = field.fview().fwd->eval(fa);
        if (ffa != fa) {
            auto rhs = [&](double x, double y) { return field.rhs(lambda, x, y); };
            auto always = [](double) { return true; };
            OdeTrace ext = rk45(rhs, fa, m.core_(fa), ffa, opt.ode_rel_tol, always, 1e18, true);
            if (ext.completed && ext.xs.size() >= 2) {
                for (std::size_t j = 0; j < ext.xs.size(); j += std::max<std::size_t>(1, ext.xs.size() / 12)) {
                    overlap = std::max(overlap, std::abs(ext.ys[j] - m.eval(ext.xs[j])));
                }
            }
        }
    } catch (const std::exception&) {
        overlap = std::numeric_limits<double>::quiet_NaN();
    }
    m.self_check_ = overlap;
}

// ------ shooting ------ //

namespace {

ShootingOutcome shoot(D1Field& field, const SolverOptions& opt) {
    ShootingOutcome out;
    out.base = field.base();
    if (!field.ok()) {
        out.note = field.note();
        return out;
    }
    double gaplo = std::min(field.gview().target, field.gview().other);
    double gaphi = std::max(field.gview().target, field.gview().other);
    ShootContext ctx{field, opt, gaplo, gaphi};

    double tol = opt.shoot_rel_tol * std::abs(field.galpha() - field.alpha());
    tol = std::max(tol, 8.0 * kNoise * std::abs(field.galpha()));

    double lambda = 1.0;
    double m1 = ctx.mismatch(1.0);
    if (std::abs(m1) > tol) {
        double la = 0, lb = 0, ma = 0, mb = 0;
        bool found = false;
        double up = 1.0, mu = m1, dn = 1.0, md = m1;
        for (int k = 1; k <= 120 && !found; ++k) {
            double nu = up * 2.0;
            double m = ctx.mismatch(nu);
            if (m * m1 <= 0) {
                la = up; ma = mu; lb = nu; mb = m;
                found = true;
                break;
            }
            up = nu; mu = m;
            double nd = dn * 0.5;
            m = ctx.mismatch(nd);
            if (m * m1 <= 0) {
                la = dn; ma = md; lb = nd; mb = m;
                found = true;
                break;
            }
            dn = nd; md = m;
        }
        if (!found) {
            out.note = "shooting bracket failure: mismatch never changes sign";
            return out;
        }
        for (int it = 0; it < opt.bisect_cap; ++it) {
            double mid = std::sqrt(la * lb);
            double m = ctx.mismatch(mid);
            if (std::abs(m) <= tol) {
                la = lb = mid;
                ma = mb = m;
                break;
            }
            if ((m <= 0) == (mb <= 0)) {
                lb = mid; mb = m;
            } else {
                la = mid; ma = m;
            }
            if (std::abs(lb - la) <= 2.0 * kNoise * std::max(la, lb)) break;
        }
        lambda = std::abs(ma) <= std::abs(mb) ? la : lb;
    }
    out.lambda = lambda;

    OdeTrace tr;
    double dom = std::abs(field.fa() - field.a());
    double mfin = ctx.mismatch(lambda, &tr, dom / std::max(64, opt.map_samples / 2));
    (void)mfin;
    if (!tr.completed) {
        out.note = "final integration left the gap";
        return out;
    }
    out.ok = true;
    out.note = "ok";
    ConjugacyMap map;
    SolverAccess::init(map, field, std::move(tr), lambda, opt);
    out.map = std::move(map);
    return out;
}

}  // namespace

// ------ public entry points ------ //

ShootingOutcome phi_plus(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                         double a, double alpha, const SolverOptions& opt) {
    double pf = std::isfinite(gf.d()) ? gf.d() : gf.c();
    double pg = std::isfinite(gg.d()) ? gg.d() : gg.c();
    D1Field field(view_toward(f, gf, pf), view_toward(g, gg, pg), a, alpha, opt);
    return shoot(field, opt);
}

ShootingOutcome phi_minus(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                          double a, double alpha, const SolverOptions& opt) {
    if (!std::isfinite(gf.c()) || !std::isfinite(gg.c()))
        throw NumericError("phi_minus needs finite backward ends");
    D1Field field(view_toward(f, gf, gf.c()), view_toward(g, gg, gg.c()), a, alpha, opt);
    return shoot(field, opt);
}

double find_lambda(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                   double a, double alpha, const SolverOptions& opt) {
    ShootingOutcome out = phi_plus(f, gf, g, gg, a, alpha, opt);
    if (!out.ok) throw NumericError("find_lambda: " + out.note);
    return out.lambda;
}

D1Candidate solve_d1(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                     double a, double alpha, double lambda, const SolverOptions& opt) {
    double pf = std::isfinite(gf.d()) ? gf.d() : gf.c();
    double pg = std::isfinite(gg.d()) ? gg.d() : gg.c();
    D1Field field(view_toward(f, gf, pf), view_toward(g, gg, pg), a, alpha, opt);
    D1Candidate out;
    if (!field.ok()) throw NumericError("solve_d1: " + field.note());
    double gaplo = std::min(field.gview().target, field.gview().other);
    double gaphi = std::max(field.gview().target, field.gview().other);
    double pad = 1e-10 * std::abs(field.galpha() - field.alpha());
    double clo = gaplo + pad;
    double chi_ = std::isfinite(gaphi) ? gaphi - pad : std::numeric_limits<double>::max();
    auto rhs = [&](double x, double y) {
        return field.rhs(lambda, x, std::clamp(y, clo, chi_));
    };
    auto inside = [&](double y) { return y > gaplo && y < gaphi; };
    double dom = std::abs(field.fa() - field.a());
    OdeTrace tr =
        rk45(rhs, field.a(), field.alpha(), field.fa(), opt.ode_rel_tol, inside, dom / 64.0, true);
    out.completed = tr.completed;
    out.phi_at_fa = tr.y_end;
    out.xs = std::move(tr.xs);
    out.phis = std::move(tr.ys);
    return out;
}

// ------ smoothness probe ------ //

SmoothnessDiagnostics probe_smoothness(const ConjugacyMap& phi, int max_order, double ratio,
                                       int min_targets, long long walk_budget) {
    SmoothnessDiagnostics diag;
    const GapView& fv = phi.fview();
    const GapView& gv = phi.gview();
    double d = fv.target;
    double lo = phi.samples().x_min(), hi = phi.samples().x_max();
    double far_edge = (std::abs(lo - d) < std::abs(hi - d)) ? hi : lo;

    // paired orbit walk toward d, decimated into a sample table ordered by
    // decreasing |x - d|
    std::vector<double> xs, ys;
    xs.reserve(1 << 16);
    ys.reserve(1 << 16);
    {
        WarmFwd ffwd(fv), gfwd(gv);
        double x = far_edge;
        double y = phi.eval(far_edge);
        double last = std::numeric_limits<double>::infinity();
        for (long long n = 0; n < walk_budget; ++n) {
            double dist = std::abs(x - d);
            if (dist == 0.0) break;
            if (n == 0 || std::abs(x - last) >= 2e-5 * dist) {
                xs.push_back(x);
                ys.push_back(y);
                last = x;
            }
            double nx = ffwd.step(x);
            if (nx == x) break;  // orbit dead at double resolution
            double ny = gfwd.step(y);
            x = nx;
            y = ny;
        }
        if (!xs.empty()) diag.reached = std::abs(xs.back() - d);
    }
    if (xs.size() < 16) {
        diag.note = "orbit walk produced too few samples near the endpoint";
        return diag;
    }

    double t_hi = std::abs(xs.front() - d) * 0.9;
    double t_lo = std::max(diag.reached * 2.5, t_hi * std::pow(ratio, 4.0 * min_targets));
    if (t_lo >= t_hi) t_lo = 0.5 * t_hi;
    int n_targets = std::max(8, static_cast<int>(std::log(t_lo / t_hi) / std::log(ratio)));
    n_targets = std::min(n_targets, 64);
    double eff_ratio = std::exp(std::log(t_lo / t_hi) / n_targets);
    diag.window_clamped = eff_ratio > ratio + 1e-9;
    if (diag.window_clamped)
        diag.note = "probe window clamped by the orbit budget; effective ratio " +
                    std::to_string(eff_ratio);

    std::vector<double> targets;
    for (int i = 0; i <= n_targets; ++i) targets.push_back(t_hi * std::pow(eff_ratio, i));

    auto nearest_index = [&](double tau) {
        int a = 0, b = static_cast<int>(xs.size()) - 1;
        while (a < b) {
            int mid = (a + b) / 2;
            if (std::abs(xs[mid] - d) > tau) a = mid + 1;
            else b = mid;
        }
        return a;
    };

    for (int k = 1; k <= max_order; ++k) {
        OrderDiagnostic od;
        od.order = k;
        std::vector<double> taus, vals;
        const double sep_factor = (k == 1) ? 2e-4 : (k == 2) ? 2e-3 : (k == 3) ? 6e-3 : 1.5e-2;
        for (double tau : targets) {
            int ci = nearest_index(tau);
            double sep = tau * sep_factor;
            std::vector<double> nodes{xs[ci]}, nvals{ys[ci]};
            int li = ci - 1, ri = ci + 1;
            auto far_enough = [&](double cand) {
                for (double nd : nodes)
                    if (std::abs(cand - nd) < sep) return false;
                return true;
            };
            while (static_cast<int>(nodes.size()) < 2 * k + 3) {
                while (li >= 0 && !far_enough(xs[li])) --li;
                while (ri < static_cast<int>(xs.size()) && !far_enough(xs[ri])) ++ri;
                bool can_l = li >= 0, can_r = ri < static_cast<int>(xs.size());
                if (!can_l && !can_r) break;
                if (can_l && (!can_r || nodes.size() % 2 == 0)) {
                    nodes.push_back(xs[li]);
                    nvals.push_back(ys[li--]);
                } else {
                    nodes.push_back(xs[ri]);
                    nvals.push_back(ys[ri++]);
                }
            }
            if (static_cast<int>(nodes.size()) < k + 2) continue;
            std::vector<double> w = fd_weights(nodes, xs[ci], k);
            double est = 0.0, amp = 0.0;
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                est += w[j] * nvals[j];
                amp += std::abs(w[j]) * (std::abs(nvals[j]) + 1.0);
            }
            if (std::abs(est) < 8.0 * amp * 1e-13) est = 0.0;  // at the noise floor
            taus.push_back(std::abs(xs[ci] - d));
            vals.push_back(est);
        }
        od.points = static_cast<int>(taus.size());
        if (od.points < 4) {
            od.note = "too few probe points; refine the grid near the endpoint";
            diag.orders.push_back(od);
            continue;
        }
        od.window_lo = taus.back();
        od.window_hi = taus.front();
        int zeros = 0;
        for (double v : vals)
            if (v == 0.0) ++zeros;
        if (zeros >= (3 * od.points) / 4) {
            od.kind = OrderDiagnostic::Kind::FiniteLimit;
            od.limit = 0.0;
            od.r2 = 1.0;
            od.note = "estimates at the divided-difference noise floor";
            diag.orders.push_back(od);
            continue;
        }
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            if (vals[i] != 0.0) {
                lx.push_back(std::log(taus[i]));
                ly.push_back(std::log(std::abs(vals[i])));
            }
        }
        LinFit fit = linear_fit(lx, ly);
        if (fit.slope < -0.05 && fit.r2 >= 0.9) {
            od.kind = OrderDiagnostic::Kind::PowerBlowup;
            od.exponent = fit.slope;
            od.r2 = fit.r2;
            diag.orders.push_back(od);
            continue;
        }
        // finite limit with a power-law correction: v ~ c0 + c1 tau^beta
        double best_sse = std::numeric_limits<double>::infinity();
        double best_c0 = vals.back(), best_r2 = 0.0;
        double vmean = 0.0;
        for (double v : vals) vmean += v;
        vmean /= vals.size();
        double stot = 0.0;
        for (double v : vals) stot += (v - vmean) * (v - vmean);
        for (double beta = 0.15; beta <= 2.01; beta += 0.05) {
            double s1 = static_cast<double>(vals.size()), sb = 0, sbb = 0, sv = 0, sbv = 0;
            for (std::size_t i = 0; i < taus.size(); ++i) {
                double b = std::pow(taus[i], beta);
                sb += b;
                sbb += b * b;
                sv += vals[i];
                sbv += b * vals[i];
            }
            double det = s1 * sbb - sb * sb;
            if (det == 0) continue;
            double c0 = (sv * sbb - sb * sbv) / det;
            double c1 = (s1 * sbv - sb * sv) / det;
            double sse = 0.0;
            for (std::size_t i = 0; i < taus.size(); ++i) {
                double r = vals[i] - c0 - c1 * std::pow(taus[i], beta);
                sse += r * r;
            }
            if (sse < best_sse) {
                best_sse = sse;
                best_c0 = c0;
                best_r2 = stot > 0 ? 1.0 - sse / stot : 1.0;
            }
        }
        od.kind = OrderDiagnostic::Kind::FiniteLimit;
        od.limit = best_c0;
        od.r2 = best_r2;
        diag.orders.push_back(od);
    }
    return diag;
}

// ------ compositional roots ------ //

RootOutcome compositional_root(const Diffeo& f, const Gap& gap, int k, double a,
                               const SolverOptions& opt) {
    RootOutcome out;
    if (k < 1) {
        out.note = "root order must be positive";
        return out;
    }
    double p = std::isfinite(gap.d()) ? gap.d() : gap.c();
    GapView view = view_toward(f, gap, p);
    double fa = view.fwd->eval(a);

    try {
        D1Field field(view, view, a, 0.5 * (a + fa), opt, /*same_map=*/true);
        if (!field.ok()) throw NumericError(field.note());

        auto psi_k_at_a = [&](double alpha) {
            field.rebase_alpha(alpha);
            ShootingOutcome sh = shoot(field, opt);
            if (!sh.ok) throw NumericError("root shooting failed: " + sh.note);
            double v = a;
            for (int i = 0; i < k; ++i) v = sh.map->eval(v);
            return std::make_pair(v, std::move(sh));
        };

        double alpha_final;
        if (k == 1) {
            alpha_final = fa;
        } else {
            double lo = std::min(a, fa), hi = std::max(a, fa);
            double pad = 1e-9 * (hi - lo);
            double alo = lo + pad, ahi = hi - pad;
            double mlo = psi_k_at_a(alo).first - fa;
            double mhi = psi_k_at_a(ahi).first - fa;
            if (mlo * mhi > 0) {
                out.note = "root bisection bracket failed";
                return out;
            }
            alpha_final = 0.5 * (alo + ahi);
            for (int it = 0; it < 64; ++it) {
                alpha_final = 0.5 * (alo + ahi);
                double m = psi_k_at_a(alpha_final).first - fa;
                if ((m <= 0) == (mhi <= 0)) {
                    ahi = alpha_final;
                    mhi = m;
                } else {
                    alo = alpha_final;
                    mlo = m;
                }
                if (std::abs(ahi - alo) <= 1e-13 * std::abs(a - fa)) break;
            }
        }
        auto [vk, sh] = psi_k_at_a(alpha_final);
        (void)vk;
        out.root = std::move(sh.map);

        double lo = std::min(a, fa), hi = std::max(a, fa);
        double sup = 0.0;
        for (int i = 0; i <= 64; ++i) {
            double x = lo + (hi - lo) * i / 64.0;
            double v = x;
            for (int j = 0; j < k; ++j) v = out.root->eval(v);
            sup = std::max(sup, std::abs(v - view.fwd->eval(x)));
        }
        out.residual = sup;
        out.ok = true;
        out.note = "ok";
    } catch (const std::exception& e) {
        out.ok = false;
        out.note = e.what();
    }
    return out;
}

// ------ Sergeraert criterion ------ //

SergeraertResult sergeraert_criterion(const Diffeo& f, const Gap& gap, double delta,
                                      double kappa_max, int samples) {
    SergeraertResult out;
    out.delta = delta;
    double p = std::isfinite(gap.d()) ? gap.d() : gap.c();
    GapView view = view_toward(f, gap, p);
    double side = (view.other > view.target) ? 1.0 : -1.0;
    double runmax = 0.0, worst = 0.0;
    int used = 0;
    for (int i = 0; i < samples; ++i) {
        // log-spaced from the endpoint outward over six decades
        double tau = delta * std::pow(1e-6, static_cast<double>(samples - 1 - i) / (samples - 1));
        double x = view.target + side * tau;
        double disp = std::abs(displacement(*view.fwd, x));
        if (disp == 0.0) continue;
        runmax = std::max(runmax, disp);
        worst = std::max(worst, runmax / disp);
        ++used;
    }
    out.worst_ratio = worst;
    int min_used = std::min(40, samples / 4);
    out.satisfied = used >= min_used && worst <= kappa_max;
    if (used < samples / 2)
        out.note = "displacement below double resolution on part of the window; "
                   "criterion checked on " + std::to_string(used) + " live samples";
    return out;
}

}  // namespace ivd
