#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ivd/smooth_map.hpp"

namespace ivd {

// Compensated (Neumaier) accumulator for long sums of near-cancelling terms.
class Accumulator {
public:
    void add(double t) {
        double s = sum_ + t;
        if (std::abs(sum_) >= std::abs(t)) comp_ += (sum_ - s) + t;
        else comp_ += (t - s) + sum_;
        sum_ = s;
    }
    double total() const { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

enum class ProductStatus { Converged, Diverged, Undetermined };

struct ProductResult {
    ProductStatus status = ProductStatus::Undetermined;
    double log_value = 0.0;
    double value = 1.0;
    long long terms_used = 0;
    double tail_bound = 0.0;   // heuristic residual bound on the log
    double explicit_part = 0.0;  // diagnostic: summed phase
    double tail_part = 0.0;      // diagnostic: flow-tail phase
    std::string note;

    bool converged() const { return status == ProductStatus::Converged; }
};

struct ProductOptions {
    double tol = 1e-8;                 // requested bound on the log residual
    long long budget = 10'000'000;
    double divergence_threshold = 50.0;
    int noise_streak = 8;              // factors at machine noise before stopping
    double handoff_gate = 0.002;       // |f'-1| bound for the flow-tail regime
    long long handoff_min_terms = 32;
    bool enable_flow_tail = true;
};

// Local series model of the displacement u(t) = f(t) - t around the
// endpoint d, used where direct subtraction loses all relative accuracy.
// Built from the jet of f at d and calibrated against direct evaluation;
// unusable models (flat endpoints, jets that do not exist at d) fall back
// to direct evaluation.
struct EndpointModel {
    bool usable = false;
    double d = 0.0;
    double radius = 0.0;
    std::vector<double> ucoef;  // u(t) = sum_k ucoef[k-1] (t-d)^k

    double u(double t) const {
        double dt = t - d, s = 0.0;
        for (std::size_t k = ucoef.size(); k-- > 0;) s = s * dt + ucoef[k];
        return s * dt;
    }
    double uprime(double t) const {  // f'(t) - 1
        double dt = t - d, s = 0.0;
        for (std::size_t k = ucoef.size(); k-- > 0;) s = s * dt + (k + 1) * ucoef[k];
        return s;
    }
    double usecond(double t) const {  // f''(t)
        double dt = t - d, s = 0.0;
        for (std::size_t k = ucoef.size(); k-- > 1;) s = s * dt + (k + 1) * k * ucoef[k];
        return s;
    }
    bool covers(double t) const { return usable && std::abs(t - d) <= radius; }
};

// One side of a paired derivative product: a map iterated toward its
// attracting endpoint d (finite).  The map must move points strictly
// toward d on the relevant side.
struct OrbitSide {
    const SmoothMap* map = nullptr;
    double d = 0.0;
    EndpointModel model;
};

// Builds the side together with its endpoint model; `interior_hint` is any
// point of the gap on the working side of d.
OrbitSide make_orbit_side(const SmoothMap& map, double d, double interior_hint);

// log of  prod_{n>=0} f'(f^n(x)) / g'(g^n(xi)),  both orbits converging to
// the respective attracting endpoints.  This is the one-sided product H1;
// every other product in the toolkit reduces to it (H2 through inverse maps,
// F/G self-products with g = f, the two-sided H as a quotient).
ProductResult paired_log_product(const OrbitSide& f, double x,
                                 const OrbitSide& g, double xi,
                                 const ProductOptions& opt = {});

// Displacement f(x) - x, routed through ExprMap's cancellation-safe form
// when the expression is literally  x + r  or  x - r.
double displacement(const SmoothMap& f, double x);

// Model vector field whose time-1 map approximates the side's map near x
// (used by the flow tail); relative error O(|f'-1|^3).
double flow_field(const OrbitSide& side, double x);
double flow_field(const SmoothMap& f, double x);

}  // namespace ivd
