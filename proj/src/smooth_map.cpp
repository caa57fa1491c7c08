#include "ivd/smooth_map.hpp"

#include <cmath>

#include "ivd/errors.hpp"

namespace ivd {

// ------ monotone root solving ------ //

double invert_monotone(const SmoothMap& f, double y, double lo, double hi, double rel_tol) {
    // establish a finite bracket, growing toward infinite ends as needed
    double a, b;
    if (std::isfinite(lo) && std::isfinite(hi)) { a = lo; b = hi; }
    else if (std::isfinite(lo)) { a = lo; b = lo + 1.0; }
    else if (std::isfinite(hi)) { a = hi - 1.0; b = hi; }
    else { a = -1.0; b = 1.0; }
    double fa = f.eval(a) - y, fb = f.eval(b) - y;
    for (int i = 0; i < 300 && fa * fb > 0; ++i) {
        bool grew = false;
        if (!std::isfinite(lo)) {
            double na = a - std::max(1.0, 2.0 * (b - a));
            a = na;
            fa = f.eval(a) - y;
            grew = true;
        }
        if (fa * fb > 0 && !std::isfinite(hi)) {
            double nb = b + std::max(1.0, 2.0 * (b - a));
            b = nb;
            fb = f.eval(b) - y;
            grew = true;
        }
        if (!grew) break;
    }
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0) throw NumericError("invert_monotone: bracket does not contain the target");

    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double v, d;
        f.eval_d1(x, v, d);
        double fx = v - y;
        if (fx == 0) return x;
        if (fa * fx < 0) { b = x; fb = fx; }
        else { a = x; fa = fx; }
        double step = (d != 0) ? fx / d : 0.0;
        double xn = x - step;
        if (!(xn > a && xn < b) || step == 0.0) xn = 0.5 * (a + b);
        double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        if (std::abs(b - a) <= rel_tol * scale) return 0.5 * (a + b);
        if (xn == x) return x;
        x = xn;
    }
    return x;
}

// ------ InverseMap ------ //

InverseMap::InverseMap(SmoothMapPtr f, double lo, double hi) : f_(std::move(f)), lo_(lo), hi_(hi) {
    double a = std::isfinite(lo_) ? lo_ : -1.0;
    double b = std::isfinite(hi_) ? hi_ : a + 1.0;
    if (!(a < b)) b = a + 1.0;
    increasing_ = f_->eval(b) > f_->eval(a);
}

double InverseMap::eval(double y) const { return invert_monotone(*f_, y, lo_, hi_); }

void InverseMap::eval_d1(double y, double& v, double& d1) const {
    double x = eval(y);
    double fv, fd;
    f_->eval_d1(x, fv, fd);
    if (fd == 0) throw NumericError("inverse derivative at a critical point");
    v = x;
    d1 = 1.0 / fd;
}

Jet InverseMap::eval_jet(double a, int K) const {
    double x = eval(a);
    Jet fj = f_->eval_jet(x, K);
    return jet_invert(fj, x);
}

std::string InverseMap::describe() const { return "inverse(" + f_->describe() + ")"; }

// ------ ComposedMap ------ //

double ComposedMap::eval(double x) const {
    double v = x;
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) v = (*it)->eval(v);
    return v;
}

void ComposedMap::eval_d1(double x, double& v, double& d1) const {
    v = x;
    d1 = 1.0;
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
        double nv, nd;
        (*it)->eval_d1(v, nv, nd);
        v = nv;
        d1 *= nd;
    }
}

Jet ComposedMap::eval_jet(double a, int K) const {
    Jet j = Jet::variable(K, a);
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
        Jet outer = (*it)->eval_jet(j[0], K);
        j = jet_compose(outer, j);
    }
    return j;
}

std::string ComposedMap::describe() const {
    std::string s = "compose(";
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        if (i) s += ", ";
        s += chain_[i]->describe();
    }
    return s + ")";
}

// ------ FlowMap ------ //

double FlowMap::eval(double x) const {
    double h = t_ / steps_;
    double y = x;
    for (int i = 0; i < steps_; ++i) {
        double k1 = v_.eval(y);
        double k2 = v_.eval(y + 0.5 * h * k1);
        double k3 = v_.eval(y + 0.5 * h * k2);
        double k4 = v_.eval(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
}

void FlowMap::eval_d1(double x, double& v, double& d1) const {
    Jet j = eval_jet(x, 1);
    v = j[0];
    d1 = j[1];
}

Jet FlowMap::eval_jet(double a, int K) const {
    double h = t_ / steps_;
    Jet y = Jet::variable(K, a);
    for (int i = 0; i < steps_; ++i) {
        Jet k1 = v_.eval_jet_arg(y);
        Jet k2 = v_.eval_jet_arg(y + k1 * (0.5 * h));
        Jet k3 = v_.eval_jet_arg(y + k2 * (0.5 * h));
        Jet k4 = v_.eval_jet_arg(y + k3 * h);
        y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    return y;
}

std::string FlowMap::describe() const {
    return "flow(" + v_.print() + ", t=" + std::to_string(t_) + ")";
}

// ------ helpers ------ //

SmoothMapPtr make_expr(const std::string& source) { return ExprMap::parse(source); }

SmoothMapPtr make_inverse(SmoothMapPtr f, double lo, double hi) {
    if (auto* im = dynamic_cast<const InverseMap*>(f.get())) return im->inner();
    return std::make_shared<InverseMap>(std::move(f), lo, hi);
}

SmoothMapPtr make_conjugate(SmoothMapPtr f, SmoothMapPtr s, double lo, double hi) {
    std::vector<SmoothMapPtr> chain;
    chain.push_back(make_inverse(s, lo, hi));
    chain.push_back(std::move(f));
    chain.push_back(std::move(s));
    return std::make_shared<ComposedMap>(std::move(chain));
}

}  // namespace ivd
