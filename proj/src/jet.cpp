#include "ivd/jet.hpp"

#include <cmath>

#include "ivd/errors.hpp"

namespace ivd {

double Jet::derivative(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c_[k] * fact;
}

Jet operator-(const Jet& u) {
    Jet w(u.order());
    for (int k = 0; k <= u.order(); ++k) w[k] = -u[k];
    return w;
}

Jet operator+(const Jet& u, const Jet& v) {
    Jet w(u.order());
    for (int k = 0; k <= u.order(); ++k) w[k] = u[k] + v[k];
    return w;
}

Jet operator-(const Jet& u, const Jet& v) {
    Jet w(u.order());
    for (int k = 0; k <= u.order(); ++k) w[k] = u[k] - v[k];
    return w;
}

Jet operator*(const Jet& u, const Jet& v) {
    const int K = u.order();
    Jet w(K);
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        for (int i = 0; i <= k; ++i) s += u[i] * v[k - i];
        w[k] = s;
    }
    return w;
}

Jet operator/(const Jet& u, const Jet& v) {
    if (v[0] == 0.0) throw NumericError("jet division by zero");
    const int K = u.order();
    Jet w(K);
    for (int k = 0; k <= K; ++k) {
        double s = u[k];
        for (int i = 0; i < k; ++i) s -= w[i] * v[k - i];
        w[k] = s / v[0];
    }
    return w;
}

Jet operator+(const Jet& u, double s) {
    Jet w = u;
    w[0] += s;
    return w;
}
Jet operator-(const Jet& u, double s) { return u + (-s); }
Jet operator*(const Jet& u, double s) {
    Jet w(u.order());
    for (int k = 0; k <= u.order(); ++k) w[k] = u[k] * s;
    return w;
}

Jet jet_exp(const Jet& u) {
    const int K = u.order();
    Jet w(K);
    w[0] = std::exp(u[0]);
    for (int k = 1; k <= K; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * u[j] * w[k - j];
        w[k] = s / k;
    }
    return w;
}

Jet jet_log(const Jet& u) {
    if (!(u[0] > 0.0)) throw NumericError("jet log of non-positive value");
    const int K = u.order();
    Jet w(K);
    w[0] = std::log(u[0]);
    for (int k = 1; k <= K; ++k) {
        double s = k * u[k];
        for (int j = 1; j < k; ++j) s -= j * w[j] * u[k - j];
        w[k] = s / (k * u[0]);
    }
    return w;
}

Jet jet_sin(const Jet& u) {
    const int K = u.order();
    Jet s(K), c(K);
    s[0] = std::sin(u[0]);
    c[0] = std::cos(u[0]);
    for (int k = 1; k <= K; ++k) {
        double as = 0.0, ac = 0.0;
        for (int j = 1; j <= k; ++j) {
            as += j * u[j] * c[k - j];
            ac += j * u[j] * s[k - j];
        }
        s[k] = as / k;
        c[k] = -ac / k;
    }
    return s;
}

Jet jet_cos(const Jet& u) {
    const int K = u.order();
    Jet s(K), c(K);
    s[0] = std::sin(u[0]);
    c[0] = std::cos(u[0]);
    for (int k = 1; k <= K; ++k) {
        double as = 0.0, ac = 0.0;
        for (int j = 1; j <= k; ++j) {
            as += j * u[j] * c[k - j];
            ac += j * u[j] * s[k - j];
        }
        s[k] = as / k;
        c[k] = -ac / k;
    }
    return c;
}

Jet jet_pow(const Jet& u, double r) {
    if (!(u[0] > 0.0)) throw NumericError("jet pow with non-integer exponent at non-positive base");
    const int K = u.order();
    Jet w(K);
    w[0] = std::pow(u[0], r);
    // u w' = r u' w  =>  k u0 w_k = sum_{j=1..k} (j(r+1)-k) u_j w_{k-j}
    for (int k = 1; k <= K; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += (j * (r + 1.0) - k) * u[j] * w[k - j];
        w[k] = s / (k * u[0]);
    }
    return w;
}

Jet jet_sqrt(const Jet& u) {
    if (!(u[0] > 0.0)) throw NumericError("jet sqrt of non-positive value");
    return jet_pow(u, 0.5);
}

Jet jet_pow_int(const Jet& u, long long n) {
    const int K = u.order();
    if (n == 0) return Jet::constant(K, 1.0);
    if (u[0] != 0.0 && u[0] > 0.0) return jet_pow(u, static_cast<double>(n));
    // base <= 0: repeated squaring keeps integer powers exact in sign handling
    bool neg = n < 0;
    unsigned long long m = neg ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
    Jet acc = Jet::constant(K, 1.0);
    Jet base = u;
    while (m) {
        if (m & 1ULL) acc = acc * base;
        base = base * base;
        m >>= 1ULL;
    }
    if (neg) {
        if (u[0] == 0.0) throw NumericError("jet negative power of zero");
        return Jet::constant(K, 1.0) / acc;
    }
    return acc;
}

Jet jet_compose(const Jet& u, const Jet& v) {
    const int K = u.order();
    // Horner on the shifted inner jet (v with constant term dropped).
    Jet dv = v;
    dv[0] = 0.0;
    Jet acc = Jet::constant(K, u[K]);
    for (int k = K - 1; k >= 0; --k) acc = acc * dv + u[k];
    return acc;
}

Jet jet_invert(const Jet& u, double x0) {
    const int K = u.order();
    if (u[1] == 0.0) throw NumericError("jet reversion requires nonzero first coefficient");
    // Solve w(u(x) - u0) = x - x0 coefficientwise.
    Jet w(K);
    w[0] = x0;
    if (K >= 1) w[1] = 1.0 / u[1];
    Jet du = u;
    du[0] = 0.0;
    // powers[j] = du^j truncated
    std::vector<Jet> powers;
    powers.reserve(K + 1);
    powers.push_back(Jet::constant(K, 1.0));
    for (int j = 1; j <= K; ++j) powers.push_back(powers.back() * du);
    for (int k = 2; k <= K; ++k) {
        // coefficient of x^k in sum_j w_j du^j must vanish; [du^k]_k = u1^k
        double s = 0.0;
        for (int j = 1; j < k; ++j) s += w[j] * powers[j][k];
        w[k] = -s / powers[k][k];
    }
    return w;
}

}  // namespace ivd
