#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ivd/diffeo.hpp"
#include "ivd/orbit_sum.hpp"

namespace ivd {

// Execution policy for grid kernels.  Parallel and serial paths compute
// identical values point for point; the serial path is the reference the
// tests compare against.
enum class Exec { Serial, Parallel };

// A gap together with the map iterated toward one chosen finite endpoint.
// When the original map moves points away from that endpoint, the view holds
// its inverse (the standard reduction to the S_- setting), so `fwd` always
// contracts toward `target`.
struct GapView {
    SmoothMapPtr fwd;
    double target = 0.0;       // finite endpoint the fwd-orbits converge to
    double other = 0.0;        // opposite end of the gap (may be +-inf)
    bool used_inverse = false;

    OrbitSide side() const {
        double hint = std::isfinite(other) ? 0.5 * (target + other)
                                           : target + (other > target ? 1.0 : -1.0);
        return make_orbit_side(*fwd, target, hint);
    }
    bool inside(double x) const {
        return x > std::min(target, other) && x < std::max(target, other);
    }
    double fwd_multiplier() const { return fwd->derivative(target); }
};

// view of f iterated toward the gap's forward limit d(J)
GapView view_toward_d(const Diffeo& f, const Gap& gap);
// view of f^{-1} iterated toward the backward limit c(J)
GapView view_toward_c(const Diffeo& f, const Gap& gap);
// view toward a chosen finite endpoint
GapView view_toward(const Diffeo& f, const Gap& gap, double endpoint);

// One-sided product H1(f,g;x,xi) = prod f'(f^n x)/g'(g^n xi) over forward
// orbits; requires both gaps in S_-.
ProductResult h1(const Diffeo& f, const Diffeo& g, double x, double xi,
                 const ProductOptions& opt = {});
// H2: the same product over inverse orbits (toward the backward ends).
ProductResult h2(const Diffeo& f, const Diffeo& g, double x, double xi,
                 const ProductOptions& opt = {});
// Two-sided product H = H1/H2 on compact gaps.
ProductResult h_two_sided(const Diffeo& f, const Diffeo& g, double x, double xi,
                          const ProductOptions& opt = {});

struct ConditionPResult {
    Status status = Status::Undetermined;
    ProductResult forward;              // toward the relevant end(s)
    std::optional<ProductResult> backward;  // compact gaps only
    std::string note;
};

// Condition (P) on a pair of corresponding gaps, probed at (a, alpha); a
// single pair suffices (convergence at one point gives it at all points).
ConditionPResult condition_p(const Diffeo& f, const Gap& gf, const Diffeo& g,
                             const Gap& gg, double a, double alpha,
                             const ProductOptions& opt = {});

// ------ shape functions ------ //

struct ShapeGrid {
    Gap gap;
    double a = 0.0;                  // base point
    std::vector<double> xs;          // fundamental-domain grid [f(a), a]
    std::vector<double> values;      // F_a(x) (two-sided self-product)
    bool all_converged = true;
    double fprime_c = 1.0, fprime_d = 1.0;  // extension-rule data

    // extension by F_a(f(x)) = F_a(x) * f'(d)/f'(c)
    double ratio() const { return fprime_d / fprime_c; }
};

// F_a over one fundamental domain on a compact gap (and G_alpha likewise).
ShapeGrid shape_grid(const Diffeo& f, const Gap& gap, double a, int points,
                     const ProductOptions& opt = {}, Exec exec = Exec::Parallel);

struct ShapeCheckResult {
    Status status = Status::Holds;
    double constant = 1.0;       // value of H(x, h(x)) when it is constant
    double spread = 0.0;         // max deviation observed
    std::optional<std::pair<double, double>> witness;  // x pair on failure
};

// Proposition-level necessary condition: H(x, h(x)) constant on the gap.
ShapeCheckResult shape_check(const Diffeo& f, const Diffeo& g, const Gap& gf,
                             const std::function<double(double)>& h, int points,
                             double tol, const ProductOptions& opt = {},
                             Exec exec = Exec::Parallel);

struct ShapePattern {
    bool constant = false;
    bool monotone = false;
    int direction = 0;            // +1 increasing, -1 decreasing (monotone case)
    std::vector<int> extrema;     // sign pattern of interior extrema (+1 max, -1 min)
};
ShapePattern classify_pattern(const ShapeGrid& grid, double tol);

enum class PatternVerdict { Compatible, Incompatible };
PatternVerdict pattern_compare(const ShapeGrid& Fa, const ShapeGrid& Galpha, double tol);

}  // namespace ivd
