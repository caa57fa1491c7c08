#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ivd/smooth_map.hpp"

namespace ivd {

struct Interval {
    double lower = 0.0;            // -inf allowed
    double upper = 0.0;            // +inf allowed
    bool lower_closed = false;
    bool upper_closed = false;

    bool contains(double x) const {
        if (x < lower || (x == lower && !lower_closed)) return false;
        if (x > upper || (x == upper && !upper_closed)) return false;
        return true;
    }
    std::string str() const;
};

enum class SemigroupClass { SPlus, SMinus };

// Open gap between consecutive fixed points (or a fixed point and an
// interval end), with its dynamical orientation.
struct Gap {
    double lo = 0.0, hi = 0.0;           // gap endpoints (may be +-inf)
    bool lo_fixed = false, hi_fixed = false;  // endpoint is a fixed point of the map
    SemigroupClass cls = SemigroupClass::SMinus;
    // initial endpoint c (backward limit) and final endpoint d (forward limit)
    double c() const { return cls == SemigroupClass::SMinus ? hi : lo; }
    double d() const { return cls == SemigroupClass::SMinus ? lo : hi; }
    bool compact() const;
    bool contains(double x) const { return x > lo && x < hi; }
};

struct VerifyReport {
    bool ok = true;
    std::vector<std::string> violations;
};

struct OrbitCount {
    long long count = 0;
    bool budget_exceeded = false;  // count is then a lower bound
    bool stalled = false;          // orbit stopped advancing in doubles
};

// A smooth map together with its interval, declared fixed set, and cached
// gap decomposition.  Immutable after verify(); safe to share across threads.
class Diffeo {
public:
    Diffeo(SmoothMapPtr map, Interval domain, std::vector<double> fixed_points,
           int degree = +1);

    static Diffeo from_expr(const std::string& expr, Interval domain,
                            std::vector<double> fixed_points, int degree = +1);

    const SmoothMap& map() const { return *map_; }
    SmoothMapPtr map_ptr() const { return map_; }
    const Interval& domain() const { return domain_; }
    int degree() const { return degree_; }
    const std::vector<double>& fixed_points() const { return fixed_; }
    const std::vector<Gap>& gaps() const { return gaps_; }

    double eval(double x) const { return map_->eval(x); }
    double derivative(double x) const { return map_->derivative(x); }
    void eval_d1(double x, double& v, double& d) const { return map_->eval_d1(x, v, d); }

    // f^{∘n}; negative n uses the inverse through bracketed root finding
    double iterate(double x, long long n) const;
    double inverse(double y) const;

    // multiplier at a declared fixed point
    double multiplier(double p) const { return map_->derivative(p); }

    VerifyReport verify(int grid_size = 512) const;

    const Gap* gap_containing(double x) const;

    // exact count of orbit points of `seed` inside [x_lo, x_hi]
    OrbitCount orbit_count(double x_lo, double x_hi, double seed,
                           long long budget = 10'000'000) const;

    // restriction of this map to one gap, with inverse brackets narrowed
    Diffeo restricted(const Gap& g) const;

    std::string describe() const { return map_->describe(); }

private:
    SmoothMapPtr map_;
    Interval domain_;
    std::vector<double> fixed_;
    int degree_;
    std::vector<Gap> gaps_;

    void build_gaps();
};

enum class Status { Holds, Fails, Undetermined };
std::string status_str(Status s);

struct SignConditionResult {
    Status status = Status::Holds;
    std::optional<double> witness_x;  // on failure: point where the signs differ
    std::string detail;
};

SemigroupClass classify_gap(const Diffeo& d, const Gap& gap);
SignConditionResult sign_condition(const Diffeo& f, const Diffeo& g);

struct Alignment {
    bool ok = false;
    std::string reason;                   // on refusal
    std::vector<std::pair<double, double>> pairs;  // fix(f)[i] -> fix(g)[i]
    // smooth strictly increasing interpolant through the pairs
    double operator()(double x) const;
    std::vector<double> knots_x, knots_y;
};

// order-preserving pairing of the declared fixed sets; refuses on
// cardinality mismatch (topological non-conjugacy)
Alignment align_fixed_sets(const Diffeo& f, const Diffeo& g);

}  // namespace ivd
