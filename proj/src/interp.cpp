#include "ivd/interp.hpp"

#include <algorithm>
#include <cmath>

#include "ivd/errors.hpp"

namespace ivd {

CubicInterpolant CubicInterpolant::monotone(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw NumericError("interpolant needs at least two nodes");
    std::vector<double> d(n, 0.0), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = x[i + 1] - x[i];
        if (!(h > 0)) throw NumericError("interpolation grid must be strictly increasing");
        delta[i] = (y[i + 1] - y[i]) / h;
    }
    // Fritsch-Carlson slopes
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0) {
            d[i] = 0.0;
        } else {
            double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) { d[i] = d[i + 1] = 0.0; continue; }
        double a = d[i] / delta[i], b = d[i + 1] / delta[i];
        double s = a * a + b * b;
        if (s > 9.0) {
            double t = 3.0 / std::sqrt(s);
            d[i] = t * a * delta[i];
            d[i + 1] = t * b * delta[i];
        }
    }
    CubicInterpolant c;
    c.x_ = std::move(x);
    c.y_ = std::move(y);
    c.d_ = std::move(d);
    return c;
}

CubicInterpolant CubicInterpolant::hermite(std::vector<double> x, std::vector<double> y,
                                           std::vector<double> dy) {
    if (x.size() < 2 || y.size() != x.size() || dy.size() != x.size())
        throw NumericError("hermite interpolant needs matching node/value/slope arrays");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] > x[i])) throw NumericError("interpolation grid must be strictly increasing");
    CubicInterpolant c;
    c.x_ = std::move(x);
    c.y_ = std::move(y);
    c.d_ = std::move(dy);
    return c;
}

int CubicInterpolant::find_interval(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int i = static_cast<int>(it - x_.begin()) - 1;
    if (i < 0) i = 0;
    if (i >= static_cast<int>(x_.size()) - 1) i = static_cast<int>(x_.size()) - 2;
    return i;
}

double CubicInterpolant::operator()(double x) const {
    int i = find_interval(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double CubicInterpolant::derivative(double x) const {
    int i = find_interval(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t;
    double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
    double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

std::vector<double> fd_weights(const std::vector<double>& nodes, double x0, int m) {
    const int n = static_cast<int>(nodes.size()) - 1;
    if (n < m) throw NumericError("fd_weights: not enough nodes for the requested order");
    std::vector<std::vector<double>> C(n + 1, std::vector<double>(m + 1, 0.0));
    C[0][0] = 1.0;
    double c1 = 1.0, c4 = nodes[0] - x0;
    for (int i = 1; i <= n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j <= i - 1; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
                C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
            C[j][0] = c4 * C[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) w[j] = C[j][m];
    return w;
}

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit out;
    const std::size_t n = x.size();
    if (n < 2) return out;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r2 = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

}  // namespace ivd
