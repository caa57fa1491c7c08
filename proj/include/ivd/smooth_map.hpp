#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ivd/expr.hpp"
#include "ivd/jet.hpp"

namespace ivd {

// A smooth real function of one variable with exact derivatives of any
// order at a point.  Expression-backed maps are the common case; composed
// and inverse adapters let tests and the classifier build maps like
// s^{-1} ∘ f ∘ s without leaving the interface.
class SmoothMap {
public:
    virtual ~SmoothMap() = default;

    virtual double eval(double x) const = 0;
    virtual void eval_d1(double x, double& v, double& d1) const = 0;
    virtual Jet eval_jet(double a, int K) const = 0;
    virtual std::string describe() const = 0;

    double operator()(double x) const { return eval(x); }
    double derivative(double x, int k = 1) const {
        if (k == 1) {
            double v, d;
            eval_d1(x, v, d);
            return d;
        }
        return eval_jet(x, k).derivative(k);
    }
};

using SmoothMapPtr = std::shared_ptr<const SmoothMap>;

class ExprMap final : public SmoothMap {
public:
    explicit ExprMap(Expr e) : e_(std::move(e)) {}
    static SmoothMapPtr parse(const std::string& source) {
        return std::make_shared<ExprMap>(Expr::parse(source));
    }
    double eval(double x) const override { return e_.eval(x); }
    void eval_d1(double x, double& v, double& d1) const override { e_.eval_d1(x, v, d1); }
    Jet eval_jet(double a, int K) const override { return e_.eval_jet(a, K); }
    std::string describe() const override { return e_.print(); }
    const Expr& expr() const { return e_; }

private:
    Expr e_;
};

// Functional inverse of a strictly monotone map, evaluated by bracketed
// root finding (bisection with safeguarded Newton), jets by reversion.
class InverseMap final : public SmoothMap {
public:
    // [lo, hi] must bracket the range of interest of the inverse's argument;
    // infinite ends are allowed and handled by bracket growing.
    InverseMap(SmoothMapPtr f, double lo, double hi);
    double eval(double y) const override;
    void eval_d1(double y, double& v, double& d1) const override;
    Jet eval_jet(double a, int K) const override;
    std::string describe() const override;
    SmoothMapPtr inner() const { return f_; }

private:
    SmoothMapPtr f_;
    double lo_, hi_;
    bool increasing_;
};

// g1 ∘ g2 ∘ ... ∘ gk (apply rightmost first)
class ComposedMap final : public SmoothMap {
public:
    explicit ComposedMap(std::vector<SmoothMapPtr> chain) : chain_(std::move(chain)) {}
    double eval(double x) const override;
    void eval_d1(double x, double& v, double& d1) const override;
    Jet eval_jet(double a, int K) const override;
    std::string describe() const override;

private:
    std::vector<SmoothMapPtr> chain_;
};

// Time-t map of the flow of a vector field v (an expression), by dense
// fixed-step RK4 with jet-valued states when jets are requested.  Used to
// build synthetic diffeomorphisms with prescribed end behaviour.
class FlowMap final : public SmoothMap {
public:
    FlowMap(Expr field, double time, int steps = 2048)
        : v_(std::move(field)), t_(time), steps_(steps) {}
    double eval(double x) const override;
    void eval_d1(double x, double& v, double& d1) const override;
    Jet eval_jet(double a, int K) const override;
    std::string describe() const override;

private:
    Expr v_;
    double t_;
    int steps_;
};

// conjugate s^{-1} ∘ f ∘ s on [lo, hi] (s must map [lo,hi] onto itself)
SmoothMapPtr make_conjugate(SmoothMapPtr f, SmoothMapPtr s, double lo, double hi);
// wraps f in an InverseMap; unwraps instead when f is itself an InverseMap
SmoothMapPtr make_inverse(SmoothMapPtr f, double lo, double hi);
SmoothMapPtr make_expr(const std::string& source);

// solve f(x) = y for x in [lo, hi]; f strictly monotone there.
double invert_monotone(const SmoothMap& f, double y, double lo, double hi,
                       double rel_tol = 1e-14);

}  // namespace ivd
