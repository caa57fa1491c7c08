#pragma once

#include <vector>
#include <cstddef>

namespace ivd {

// Truncated Taylor expansion of a function at a base point: coefficient k
// stores f^(k)(a)/k!.  Arithmetic is exact truncated-series arithmetic in
// doubles; the order is fixed at construction and shared by operands.
class Jet {
public:
    Jet() : c_(1, 0.0) {}
    explicit Jet(int order, double value = 0.0) : c_(order + 1, 0.0) { c_[0] = value; }

    static Jet variable(int order, double a) {
        Jet j(order, a);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }
    static Jet constant(int order, double v) { return Jet(order, v); }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }
    double value() const { return c_[0]; }

    // k-th derivative (coefficient times k!).
    double derivative(int k) const;

    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;
};

Jet operator-(const Jet& u);
Jet operator+(const Jet& u, const Jet& v);
Jet operator-(const Jet& u, const Jet& v);
Jet operator*(const Jet& u, const Jet& v);
Jet operator/(const Jet& u, const Jet& v);  // throws NumericError when v[0] == 0

Jet operator+(const Jet& u, double s);
Jet operator-(const Jet& u, double s);
Jet operator*(const Jet& u, double s);

Jet jet_exp(const Jet& u);
Jet jet_log(const Jet& u);    // u[0] > 0
Jet jet_sin(const Jet& u);
Jet jet_cos(const Jet& u);
Jet jet_sqrt(const Jet& u);   // u[0] > 0
Jet jet_pow(const Jet& u, double r);          // real exponent, u[0] > 0
Jet jet_pow_int(const Jet& u, long long n);   // integer exponent; u[0] != 0 when n < 0

// Composition u(v - v0 shifted): treats u as the jet of f at v[0] and v as the
// jet of an inner function; returns the jet of f∘v at the inner base point.
Jet jet_compose(const Jet& u, const Jet& v);

// Series reversion: jet of the inverse function at u[0], where `x0` is the
// base point u was expanded at (so the result's value is x0).  u[1] != 0.
Jet jet_invert(const Jet& u, double x0);

}  // namespace ivd
