#pragma once

#include <vector>

namespace ivd {

// Piecewise-cubic interpolant on a strictly increasing grid.
// Two slope policies:
//   * monotone (Fritsch-Carlson limited slopes): preserves strict
//     monotonicity of the data; used for conjugacy maps.
//   * hermite: caller supplies exact derivatives; fourth-order accurate,
//     used for product grids where derivatives are computed analytically.
class CubicInterpolant {
public:
    CubicInterpolant() = default;

    static CubicInterpolant monotone(std::vector<double> x, std::vector<double> y);
    static CubicInterpolant hermite(std::vector<double> x, std::vector<double> y,
                                    std::vector<double> dy);

    double operator()(double x) const;
    double derivative(double x) const;

    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

private:
    std::vector<double> x_, y_, d_;  // nodes, values, node derivatives
    int find_interval(double x) const;
};

// Finite-difference weights on arbitrary nodes (Fornberg's recurrence):
// returns w with  f^(m)(x0) ~= sum_j w[j] f(nodes[j]).
std::vector<double> fd_weights(const std::vector<double>& nodes, double x0, int m);

// simple least squares of y against [1, x]: returns (intercept, slope, r2)
struct LinFit {
    double intercept = 0.0, slope = 0.0, r2 = 0.0;
};
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ivd
