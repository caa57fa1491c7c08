#include "ivd/linearize.hpp"

#include <algorithm>
#include <cmath>

#include "ivd/errors.hpp"

namespace ivd {

SternbergResult sternberg_iterate(const Diffeo& f, const Diffeo& g, double lambda, double x,
                                  int n_max, double tol) {
    SternbergResult out;
    double window = 1e6 * (std::abs(x) + 1.0);
    double fx = x;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 1; n <= n_max; ++n) {
        fx = f.eval(fx);  // f^n(x)
        double y = lambda * fx;
        bool left = false;
        for (int k = 0; k < n; ++k) {
            if (!g.domain().contains(y) || std::abs(y) > window) {
                left = true;
                break;
            }
            y = g.inverse(y);
            if (!std::isfinite(y) || std::abs(y) > window) {
                left = true;
                break;
            }
        }
        out.iterations = n;
        if (left) {
            out.note = "iterate left the domain";
            return out;
        }
        if (std::isfinite(prev) && std::abs(y - prev) <= tol * (std::abs(y) + 1.0)) {
            out.converged = true;
            out.value = y;
            return out;
        }
        prev = y;
        out.value = y;
    }
    out.note = "no Cauchy convergence within the iteration budget";
    return out;
}

// ------ Koenigs linearizer ------ //

namespace {

// alpha at one point by the orbit limit; attracting ends use forward orbits,
// repelling ends inverse orbits.
double koenigs_value(const Diffeo& f, double p, double m, double x, double tol, int* used) {
    bool attracting = std::abs(m) < 1.0;
    double scale = 1.0;
    double y = x;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev_diff = std::numeric_limits<double>::infinity();
    double cur = x - p;
    for (int n = 1; n <= 4000; ++n) {
        if (attracting) {
            y = f.eval(y);
            scale /= m;
        } else {
            y = f.inverse(y);
            scale *= m;
        }
        cur = (y - p) * scale;
        if (used) *used = n;
        if (std::isfinite(prev)) {
            double diff = std::abs(cur - prev);
            if (diff <= tol * std::abs(cur)) return cur;
            // the limit is approached geometrically while roundoff in y - p is
            // amplified geometrically: the first upturn of the differences is
            // the achievable accuracy, return the last clean iterate
            if (n > 4 && diff > 1.25 * prev_diff) return prev;
            prev_diff = diff;
        }
        // subtractive cancellation floor
        if (std::abs(y - p) < 64.0 * 2.2e-16 * std::max(std::abs(p), std::abs(y))) return cur;
        prev = cur;
    }
    return cur;
}

}  // namespace

double LinearizerGrid::eval(double x) const {
    int used = 0;
    return koenigs_value(*source, endpoint, multiplier, x, 1e-13, &used);
}

LinearizerGrid linearizer(const Diffeo& f, double endpoint, double win_lo, double win_hi,
                          double tol, int samples) {
    LinearizerGrid grid;
    grid.endpoint = endpoint;
    grid.multiplier = f.derivative(endpoint);
    grid.source = &f;
    if (grid.multiplier == 1.0 || grid.multiplier <= 0.0)
        throw NumericError("linearizer requires a hyperbolic endpoint (multiplier != 1)");
    grid.xs.resize(samples);
    grid.values.resize(samples);
    int worst = 0;
    for (int i = 0; i < samples; ++i) {
        double x = win_lo + (win_hi - win_lo) * i / (samples - 1);
        int used = 0;
        grid.xs[i] = x;
        grid.values[i] = koenigs_value(f, endpoint, grid.multiplier, x, tol, &used);
        worst = std::max(worst, used);
    }
    grid.max_iterations = worst;
    double sup = 0.0;
    for (int i = 0; i < samples; i += 4) {
        double x = grid.xs[i];
        double lhs = koenigs_value(f, endpoint, grid.multiplier, f.eval(x), tol, nullptr);
        sup = std::max(sup, std::abs(lhs - grid.multiplier * grid.values[i]));
    }
    grid.residual = sup;
    return grid;
}

// ------ Robbin modulus ------ //

namespace {

struct EndData {
    double p;     // endpoint
    double m;     // multiplier
    double sign;  // orientation making the linearizer positive inside the gap
};

double normalized_linearizer(const Diffeo& f, const EndData& e, double x, double tol) {
    return e.sign * koenigs_value(f, e.p, e.m, x, tol, nullptr);
}

}  // namespace

Modulus robbin_modulus(const Diffeo& f, const Gap& gap, int samples) {
    if (!gap.compact()) throw NumericError("robbin_modulus requires a compact gap");
    double c = gap.c(), d = gap.d();
    double mc = f.derivative(c), md = f.derivative(d);
    if (mc == 1.0 || md == 1.0)
        throw NumericError("robbin_modulus requires hyperbolic ends; "
                           "use the product/differential-equation route instead");
    Modulus mod;
    mod.mult_c = mc;
    mod.mult_d = md;
    double mid = 0.5 * (gap.lo + gap.hi);
    EndData ce{c, mc, (mid - c > 0) ? 1.0 : -1.0};
    EndData de{d, md, (mid - d > 0) ? 1.0 : -1.0};

    double q1 = gap.lo + 0.12 * (gap.hi - gap.lo);
    double q2 = gap.lo + 0.88 * (gap.hi - gap.lo);
    double t1 = normalized_linearizer(f, ce, q1, 1e-12);
    double t2 = normalized_linearizer(f, ce, q2, 1e-12);
    mod.t_lo = std::min(t1, t2);
    mod.t_hi = std::max(t1, t2);
    bool increasing = t2 > t1;

    mod.ts.resize(samples);
    mod.values.resize(samples);
    for (int i = 0; i < samples; ++i) {
        double t = mod.t_lo * std::pow(mod.t_hi / mod.t_lo, double(i) / (samples - 1));
        double lo = q1, hi = q2;
        for (int it = 0; it < 64; ++it) {
            double midx = 0.5 * (lo + hi);
            double val = normalized_linearizer(f, ce, midx, 1e-12);
            if ((val < t) == increasing) lo = midx;
            else hi = midx;
        }
        double x = 0.5 * (lo + hi);
        mod.ts[i] = t;
        mod.values[i] = normalized_linearizer(f, de, x, 1e-12);
    }
    return mod;
}

namespace {

// log gamma against log t, linearly interpolated on the grid
double log_gamma_at(const Modulus& m, double logt) {
    std::size_t n = m.ts.size();
    std::size_t j = 1;
    while (j + 1 < n && std::log(m.ts[j]) < logt) ++j;
    double t0 = std::log(m.ts[j - 1]), t1 = std::log(m.ts[j]);
    double v0 = std::log(m.values[j - 1]), v1 = std::log(m.values[j]);
    double u = (logt - t0) / (t1 - t0);
    return v0 + u * (v1 - v0);
}

}  // namespace

ModulusComparison modulus_equal(const Modulus& a, const Modulus& b, double tol) {
    ModulusComparison out;
    if (a.ts.empty() || b.ts.empty()) return out;
    if (std::abs(std::log(a.mult_c / b.mult_c)) > 1e-6 ||
        std::abs(std::log(a.mult_d / b.mult_d)) > 1e-6)
        return out;  // different end multipliers: trivially distinct
    double lo = std::max(std::log(a.t_lo), std::log(b.t_lo));
    double hi = std::min(std::log(a.t_hi), std::log(b.t_hi));
    if (lo >= hi) return out;
    out.comparable = true;
    double sup = 0.0;
    for (int i = 0; i <= 64; ++i) {
        double lt = lo + (hi - lo) * i / 64.0;
        sup = std::max(sup, std::abs(log_gamma_at(a, lt) - log_gamma_at(b, lt)));
    }
    out.residual = sup;
    out.equal = sup <= tol;
    return out;
}

ModulusMatch modulus_equivalent(const Modulus& a, const Modulus& b, double tol) {
    ModulusMatch out;
    if (a.ts.empty() || b.ts.empty()) return out;
    if (std::abs(std::log(a.mult_c / b.mult_c)) > 1e-6 ||
        std::abs(std::log(a.mult_d / b.mult_d)) > 1e-6)
        return out;
    out.comparable = true;
    // fit log gamma_b(u) = log_c + log gamma_a(u - log_e); a conjugating map
    // rescales both axes, and one period of the c-multiplier covers the
    // distinct shifts modulo the functional equation of gamma
    double alo = std::log(a.t_lo), ahi = std::log(a.t_hi);
    double blo = std::log(b.t_lo), bhi = std::log(b.t_hi);
    double period = std::max(std::abs(std::log(a.mult_c)), 1e-3);
    double best_res = std::numeric_limits<double>::infinity();
    double best_e = 0.0, best_c = 0.0;
    for (int k = -96; k <= 96; ++k) {
        double le = period * k / 64.0;
        double lo = std::max(blo, alo + le), hi = std::min(bhi, ahi + le);
        if (hi - lo < 0.25 * (ahi - alo)) continue;
        double sum = 0.0;
        int cnt = 0;
        for (int i = 0; i <= 32; ++i) {
            double u = lo + (hi - lo) * i / 32.0;
            sum += log_gamma_at(b, u) - log_gamma_at(a, u - le);
            ++cnt;
        }
        double lc = sum / cnt;
        double sup = 0.0;
        for (int i = 0; i <= 32; ++i) {
            double u = lo + (hi - lo) * i / 32.0;
            sup = std::max(sup, std::abs(log_gamma_at(b, u) - lc - log_gamma_at(a, u - le)));
        }
        if (sup < best_res) {
            best_res = sup;
            best_e = le;
            best_c = lc;
        }
    }
    out.residual = best_res;
    out.log_c = best_c;
    out.log_e = best_e;
    out.equivalent = std::isfinite(best_res) && best_res <= tol;
    return out;
}

// ------ conventional multipliers ------ //

MultiplierGrid conventional_multiplier(const Diffeo& f, const Gap& gap, double a,
                                       int direction, int samples, long long n_cap) {
    MultiplierGrid out;
    out.a = a;
    if (!gap.contains(a)) throw NumericError("conventional_multiplier: base point outside gap");
    double end = direction >= 0 ? gap.d() : gap.c();
    if (std::isfinite(end)) {
        double probe = end + (a - end) * 1e-4;
        if (f.eval(probe) == probe) {
            out.refused = true;
            out.note = "displacement is flat at the endpoint at double resolution";
            return out;
        }
    }
    auto advance = [&](double y) { return direction >= 0 ? f.eval(y) : f.inverse(y); };

    double lo = std::isfinite(gap.lo) ? gap.lo + 0.06 * (std::min(gap.hi, a + 2.0) - gap.lo)
                                      : a - 2.0;
    double hi = std::isfinite(gap.hi) ? gap.hi - 0.06 * (gap.hi - std::max(gap.lo, a - 2.0))
                                      : a + 2.0;
    out.xs.resize(samples);
    for (int i = 0; i < samples; ++i) out.xs[i] = lo + (hi - lo) * i / (samples - 1);
    out.values.assign(samples, 0.0);

    std::vector<double> ys = out.xs;
    std::vector<double> prev(samples, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> done(samples, 0);
    int remaining = samples;
    const double tol = 1e-10;
    double an = a;
    double an1 = advance(a);
    for (long long n = 0; remaining > 0 && n < n_cap; ++n) {
        double denom = an1 - an;
        if (denom == 0.0) break;
        for (int i = 0; i < samples; ++i) {
            if (done[i]) continue;
            double cur = (ys[i] - an) / denom;
            if (std::isfinite(prev[i]) && std::abs(cur - prev[i]) <= tol * (std::abs(cur) + 1.0)) {
                out.values[i] = cur;
                done[i] = 1;
                --remaining;
                continue;
            }
            prev[i] = cur;
            out.values[i] = cur;
            ys[i] = advance(ys[i]);
        }
        an = an1;
        an1 = advance(an1);
    }
    out.eval_tol = tol;
    if (remaining > 0)
        out.note = "stopped at the iteration cap on " + std::to_string(remaining) +
                   " samples; values are the last iterates";
    return out;
}

}  // namespace ivd
