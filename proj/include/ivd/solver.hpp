#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ivd/interp.hpp"
#include "ivd/products.hpp"

namespace ivd {

struct SolverOptions {
    double ode_rel_tol = 1e-10;
    double shoot_rel_tol = 1e-10;   // times |g(alpha) - alpha|
    int bisect_cap = 200;
    int map_samples = 600;          // conjugacy-map samples on the fundamental domain
    int field_grid = 640;           // product grid points per side of the D1 field
    ProductOptions products;
    long long walk_budget = 4'000'000;  // orbit steps for far evaluation / probing
    Exec exec = Exec::Parallel;
};

// Right-hand side of the shooting problem: phi' = lambda H1(x, phi) with
// H1 factorized through product grids on the two fundamental domains.
class D1Field {
public:
    // fv, gv: gap views iterated toward the anchor endpoints; same_map reuses
    // the f-side grid for the g side (compositional roots).
    D1Field(GapView fv, GapView gv, double a, double alpha, const SolverOptions& opt,
            bool same_map = false);

    bool ok() const { return ok_; }
    const std::string& note() const { return note_; }
    const ProductResult& base() const { return base_; }

    double log_h1(double x, double xi) const;
    double rhs(double lambda, double x, double phi) const;

    // move the base value alpha (self-pairs only; used by the root search)
    void rebase_alpha(double alpha);

    double a() const { return a_; }
    double alpha() const { return alpha_; }
    double fa() const { return fa_; }
    double galpha() const { return galpha_; }
    const GapView& fview() const { return fv_; }
    const GapView& gview() const { return gv_; }

private:
    struct Grid {
        CubicInterpolant interp;  // of log F against position
        double lo = 0, hi = 0;
        double log_mult = 0;      // log fwd'(d)
        GapView view;
        double eval(double t) const;  // telescoped beyond [lo, hi]
    };
    GapView fv_, gv_;
    double a_, alpha_, fa_, galpha_;
    bool same_map_;
    Grid F_, G_;
    ProductResult base_;
    bool ok_ = false;
    std::string note_;

    Grid build_grid(const GapView& v, double base, double lo, double hi,
                    const SolverOptions& opt);
};

// Sampled conjugating map on one gap pair: dense on the fundamental domain
// [f(a), a], extended anywhere in the gap through phi(f(x)) = g(phi(x)).
class ConjugacyMap {
public:
    double eval(double x) const;
    double operator()(double x) const { return eval(x); }
    double derivative(double x) const;

    double lambda() const { return lambda_; }          // derivative at the anchor end
    double anchor() const { return d_f_; }
    double residual() const { return residual_; }
    double self_check() const { return self_check_; }  // extension vs direct overlap
    double base_point() const { return a_; }
    double base_value() const { return alpha_; }
    const CubicInterpolant& samples() const { return core_; }
    const GapView& fview() const { return fv_; }
    const GapView& gview() const { return gv_; }
    long long walk_budget() const { return walk_budget_; }

    // sup |g(phi(x)) - phi(f(x))| over `domains` fundamental domains
    double verify_residual(int samples, int domains) const;

private:
    friend struct SolverAccess;
    CubicInterpolant core_;   // on [min(fa,a), max(fa,a)]
    GapView fv_, gv_;
    double d_f_ = 0, d_g_ = 0;
    double a_ = 0, alpha_ = 0;
    double lambda_ = 1.0;
    double residual_ = 0.0;
    double self_check_ = 0.0;
    long long walk_budget_ = 4'000'000;
};

struct ShootingOutcome {
    bool ok = false;
    std::string note;
    double lambda = 1.0;
    ProductResult base;
    std::optional<ConjugacyMap> map;
};

// Phi_+(a, alpha): the unique solution anchored at the forward ends d of the
// gaps; lambda is its one-sided derivative there.
ShootingOutcome phi_plus(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                         double a, double alpha, const SolverOptions& opt = {});
// Phi_-(a, alpha): anchored at the backward ends c (compact gaps); the
// reported lambda is the derivative mu at c.
ShootingOutcome phi_minus(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                          double a, double alpha, const SolverOptions& opt = {});

double find_lambda(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                   double a, double alpha, const SolverOptions& opt = {});

// One D1 integration at a prescribed lambda (no shooting); exposes the raw
// three-parameter family for tests and diagnostics.
struct D1Candidate {
    bool completed = false;      // solution stayed in the gap
    double phi_at_fa = 0.0;
    std::vector<double> xs, phis;
};
D1Candidate solve_d1(const Diffeo& f, const Gap& gf, const Diffeo& g, const Gap& gg,
                     double a, double alpha, double lambda, const SolverOptions& opt = {});

// ------ endpoint smoothness probe (Condition E as evidence) ------ //

struct OrderDiagnostic {
    int order = 0;
    enum class Kind { FiniteLimit, PowerBlowup, Inconclusive } kind = Kind::Inconclusive;
    double limit = 0.0;     // FiniteLimit
    double exponent = 0.0;  // PowerBlowup: |phi^(k)| ~ C (x-d)^exponent
    double r2 = 0.0;
    int points = 0;
    double window_lo = 0.0, window_hi = 0.0;  // |x-d| range of the estimates
    std::string note;
};

struct SmoothnessDiagnostics {
    std::vector<OrderDiagnostic> orders;
    double reached = 0.0;  // smallest |x-d| with a usable sample
    bool window_clamped = false;
    std::string note;
};

SmoothnessDiagnostics probe_smoothness(const ConjugacyMap& phi, int max_order,
                                       double ratio = 0.7, int min_targets = 12,
                                       long long walk_budget = 4'000'000);

// ------ compositional roots and the centralizer criterion ------ //

struct RootOutcome {
    bool ok = false;
    std::string note;
    std::optional<ConjugacyMap> root;
    double residual = 0.0;  // sup |psi^{k} - f| on the fundamental domain
};
RootOutcome compositional_root(const Diffeo& f, const Gap& gap, int k, double a,
                               const SolverOptions& opt = {});

struct SergeraertResult {
    bool satisfied = false;
    double worst_ratio = 0.0;  // sup of running-max displacement over displacement
    double delta = 0.0;
    std::string note;
};
// Tests sup_{y between d and x} |y - f(y)|  <=  kappa |x - f(x)| near the
// endpoint d of the gap; "satisfied" is evidence for a connected centralizer.
SergeraertResult sergeraert_criterion(const Diffeo& f, const Gap& gap, double delta,
                                      double kappa_max, int samples = 400);

}  // namespace ivd
