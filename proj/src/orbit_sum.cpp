#include "ivd/orbit_sum.hpp"

#include <cmath>
#include <vector>
#include <limits>

#include "ivd/errors.hpp"
#include "ivd/expr.hpp"

namespace ivd {

namespace {
constexpr double kNoise = 2.220446049250313e-16;  // 2^-52
}

double displacement(const SmoothMap& f, double x) {
    if (auto* em = dynamic_cast<const ExprMap*>(&f)) {
        int sign = 0;
        int sub = em->expr().displacement_subtree(sign);
        if (sub >= 0) return sign * em->expr().eval_subtree_value(sub, x);
    }
    if (auto* im = dynamic_cast<const InverseMap*>(&f)) {
        double u = im->eval(x);
        return -displacement(*im->inner(), u);
    }
    return f.eval(x) - x;
}

double flow_field(const SmoothMap& f, double x) {
    double u = displacement(f, x);
    if (u == 0.0) return 0.0;
    Jet j = f.eval_jet(x, 2);
    double up = j[1] - 1.0;       // u'
    double upp = 2.0 * j[2];      // u''
    // inverse of the flow expansion f = x + v + vv'/2 + (v v'^2 + v^2 v'')/6
    return u * (1.0 - 0.5 * up + up * up / 3.0) + u * u * upp / 12.0;
}

double flow_field(const OrbitSide& side, double x) {
    if (side.model.covers(x)) {
        double u = side.model.u(x);
        double up = side.model.uprime(x);
        double upp = side.model.usecond(x);
        return u * (1.0 - 0.5 * up + up * up / 3.0) + u * u * upp / 12.0;
    }
    return flow_field(*side.map, x);
}

OrbitSide make_orbit_side(const SmoothMap& map, double d, double interior_hint) {
    OrbitSide side;
    side.map = &map;
    side.d = d;
    EndpointModel& m = side.model;
    m.d = d;
    const int order = 12;
    try {
        Jet j = map.eval_jet(d, order);
        m.ucoef.assign(order, 0.0);
        m.ucoef[0] = j[1] - 1.0;
        for (int k = 2; k <= order; ++k) m.ucoef[k - 1] = j[k];
        // calibrate the trust radius against direct evaluation, scanning in
        // from the interior point on the working side
        double span = interior_hint - d;
        double best = 0.0;
        for (int k = 1; k <= 44 && best == 0.0; ++k) {
            double t = d + span * std::pow(0.5, k);
            if (t == d) break;
            double direct = displacement(map, t);
            double noise_floor = 64.0 * kNoise * std::max(std::abs(t), std::abs(map.eval(t)));
            if (std::abs(direct) <= 1e6 * noise_floor) continue;  // direct no longer trustworthy
            double series = m.u(t);
            if (std::abs(series - direct) <= 1e-4 * std::abs(direct)) best = std::abs(t - d);
        }
        if (best > 0.0) {
            m.radius = best;
            m.usable = true;
        }
    } catch (const std::exception&) {
        m.usable = false;  // jets unavailable at the endpoint
    }
    return side;
}

namespace {

struct TailResult {
    double value = 0.0;
    double err_proxy = 0.0;
    bool diverged = false;
    long long steps = 0;
};

// Tail sum_{n>=N} [log f'(x_n) - log g'(xi_n)] approximated by the integral
// of the integrand along the model flows, started half a step back of the
// current points (midpoint rule in orbit time).
TailResult flow_tail(const OrbitSide& f, double xN, const OrbitSide& g, double xiN,
                     double divergence_threshold, double h_scale, double tol) {
    TailResult out;
    auto chi_f = [&](double t) {
        if (f.model.covers(t)) return std::log1p(f.model.uprime(t));
        double v, d;
        f.map->eval_d1(t, v, d);
        return d > 0 ? std::log(d) : 0.0;
    };
    auto chi_g = [&](double t) {
        if (g.model.covers(t)) return std::log1p(g.model.uprime(t));
        double v, d;
        g.map->eval_d1(t, v, d);
        return d > 0 ? std::log(d) : 0.0;
    };
    auto vf = [&](double t) { return flow_field(f, t); };
    auto vg = [&](double t) { return flow_field(g, t); };

    // half step back
    double x = xN, xi = xiN;
    {
        double k1 = vf(x);
        double k2 = vf(x - 0.25 * k1);
        x -= 0.5 * k2;
        double l1 = vg(xi);
        double l2 = vg(xi - 0.25 * l1);
        xi -= 0.5 * l2;
    }

    Accumulator T;
    double h = 0.5 * h_scale;
    int small_streak = 0;
    double prev_inc = std::numeric_limits<double>::infinity();
    for (long long step = 0; step < 200000; ++step) {
        // curvature-limited step: the integrand varies on the 1/|u'| time scale
        double cf = f.model.covers(x) ? std::abs(f.model.uprime(x))
                                      : std::abs(f.map->derivative(x) - 1.0);
        double cg = g.model.covers(xi) ? std::abs(g.model.uprime(xi))
                                       : std::abs(g.map->derivative(xi) - 1.0);
        double scale = std::max(std::max(cf, cg), 1e-12);
        double hmax = 0.12 * h_scale / scale;
        if (h > hmax) h = hmax;

        // joint RK4 for (x, xi, T)
        double a1 = vf(x), b1 = vg(xi), t1 = chi_f(x) - chi_g(xi);
        double a2 = vf(x + 0.5 * h * a1), b2 = vg(xi + 0.5 * h * b1);
        double t2 = chi_f(x + 0.5 * h * a1) - chi_g(xi + 0.5 * h * b1);
        double a3 = vf(x + 0.5 * h * a2), b3 = vg(xi + 0.5 * h * b2);
        double t3 = chi_f(x + 0.5 * h * a2) - chi_g(xi + 0.5 * h * b2);
        double a4 = vf(x + h * a3), b4 = vg(xi + h * b3);
        double t4 = chi_f(x + h * a3) - chi_g(xi + h * b3);
        double inc = h / 6.0 * (t1 + 2 * t2 + 2 * t3 + t4);
        T.add(inc);
        x += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
        xi += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
        out.steps = step + 1;

        if (!std::isfinite(x) || !std::isfinite(xi) || !std::isfinite(T.total())) {
            out.diverged = true;
            break;
        }
        if (std::abs(T.total()) > divergence_threshold) {
            out.diverged = true;
            break;
        }
        // stop once the geometric continuation of the increments is far
        // below the requested tolerance
        double ainc = std::abs(inc);
        double stop_gate = std::max(0.02 * tol, 1e-18);
        if (ainc * 12.0 < stop_gate && ainc <= prev_inc) {
            if (++small_streak >= 4) break;
        } else {
            small_streak = 0;
        }
        prev_inc = ainc;
        h *= 1.15;
    }
    out.value = T.total();
    double gate = std::max(std::abs(f.map->derivative(xN) - 1.0),
                           std::abs(g.map->derivative(xiN) - 1.0));
    (void)0;
    out.err_proxy = std::abs(out.value) * 8.0 * gate * gate * gate + 1e-13;
    return out;
}

// two-resolution tail: the step-halving difference is the quadrature error
// estimate, the field-model term covers the rest
TailResult flow_tail2(const OrbitSide& f, double xN, const OrbitSide& g, double xiN,
                      double divergence_threshold, double tol) {
    TailResult coarse = flow_tail(f, xN, g, xiN, divergence_threshold, 1.0, tol);
    if (coarse.diverged) return coarse;
    TailResult fine = flow_tail(f, xN, g, xiN, divergence_threshold, 0.5, tol);
    // RK4 halving: the true error of the fine pass is about |diff|/15
    fine.err_proxy = 3.0 * fine.err_proxy + std::abs(fine.value - coarse.value) / 5.0 + 0.05 * tol;
    fine.steps += coarse.steps;
    return fine;
}

}  // namespace

ProductResult paired_log_product(const OrbitSide& f, double x,
                                 const OrbitSide& g, double xi,
                                 const ProductOptions& opt) {
    ProductResult out;
    Accumulator S;
    long long n = 0;
    int streak = 0;
    double max_c = 0.0;  // observed sup |f''|/inf f' proxy, refreshed sparsely
    std::vector<std::pair<long long, double>> checkpoints;
    bool do_tail = false;
    double cur_x = x, cur_xi = xi;

    while (n < opt.budget) {
        double fx, fp, gx, gp;
        f.map->eval_d1(cur_x, fx, fp);
        g.map->eval_d1(cur_xi, gx, gp);
        if (!(fp > 0.0) || !(gp > 0.0)) {
            out.status = ProductStatus::Undetermined;
            out.note = "derivative not positive along an orbit";
            out.terms_used = n;
            return out;
        }
        double term = std::log(fp) - std::log(gp);
        S.add(term);
        ++n;

        if ((n & 63) == 1) {
            checkpoints.emplace_back(n, S.total());
            Jet jf = f.map->eval_jet(cur_x, 2);
            Jet jg = g.map->eval_jet(cur_xi, 2);
            max_c = std::max({max_c, std::abs(2 * jf[2]) / jf[1], std::abs(2 * jg[2]) / jg[1]});
        }

        // constant-ratio divergence: linear growth of the log partial sum
        double total = S.total();
        if (std::abs(total) > opt.divergence_threshold) {
            double ref = total;
            for (auto it = checkpoints.rbegin(); it != checkpoints.rend(); ++it) {
                if (it->first <= (3 * n) / 4) { ref = it->second; break; }
            }
            if (std::abs(total) > std::abs(ref) && total * ref > 0) {
                out.status = ProductStatus::Diverged;
                out.log_value = total;
                out.terms_used = n;
                out.note = "log partial sums grow monotonically";
                return out;
            }
        }

        if (std::abs(term) < kNoise) ++streak; else streak = 0;

        bool stalled = (fx == cur_x && gx == cur_xi);
        cur_x = fx;
        cur_xi = gx;

        if (streak >= opt.noise_streak || stalled) {
            double bound = max_c * (std::abs(cur_x - f.d) + std::abs(cur_xi - g.d));
            if (bound < opt.tol || !opt.enable_flow_tail) {
                out.status = bound < opt.tol ? ProductStatus::Converged : ProductStatus::Undetermined;
                out.log_value = S.total();
                out.terms_used = n;
                out.tail_bound = bound;
                if (stalled) out.note = "orbit reached double resolution";
                out.value = std::exp(out.log_value);
                return out;
            }
            do_tail = true;
            break;
        }
        if (n >= opt.handoff_min_terms && opt.enable_flow_tail &&
            std::abs(fp - 1.0) < opt.handoff_gate && std::abs(gp - 1.0) < opt.handoff_gate) {
            do_tail = true;
            break;
        }
    }

    out.terms_used = n;
    if (!do_tail) {
        out.status = ProductStatus::Undetermined;
        out.log_value = S.total();
        out.value = std::exp(out.log_value);
        out.tail_bound = max_c * (std::abs(cur_x - f.d) + std::abs(cur_xi - g.d));
        out.note = "iteration budget exhausted";
        return out;
    }

    TailResult tail = flow_tail2(f, cur_x, g, cur_xi,
                                 opt.divergence_threshold - std::abs(S.total()), opt.tol);
    if (tail.diverged) {
        out.status = ProductStatus::Diverged;
        out.log_value = S.total() + tail.value;
        out.note = "tail integral diverges";
        return out;
    }
    out.explicit_part = S.total();
    out.tail_part = tail.value;
    S.add(tail.value);
    out.log_value = S.total();
    out.value = std::exp(out.log_value);
    out.tail_bound = tail.err_proxy + kNoise * static_cast<double>(n);
    out.status = out.tail_bound < opt.tol ? ProductStatus::Converged : ProductStatus::Undetermined;
    if (out.status == ProductStatus::Undetermined) out.note = "tail residual above tolerance";
    return out;
}

}  // namespace ivd
