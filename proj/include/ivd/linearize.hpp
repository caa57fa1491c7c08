#pragma once

#include <string>
#include <vector>

#include "ivd/diffeo.hpp"
#include "ivd/interp.hpp"
#include "ivd/products.hpp"

namespace ivd {

struct SternbergResult {
    bool converged = false;
    double value = 0.0;
    int iterations = 0;
    std::string note;
};

// h_n(x) = g^{-n}(lambda f^n(x)), Cauchy-stopped; reports NonConvergent when
// the sequence leaves the window or fails to settle.
SternbergResult sternberg_iterate(const Diffeo& f, const Diffeo& g, double lambda, double x,
                                  int n_max = 200, double tol = 1e-12);

// Koenigs linearizer at a hyperbolic endpoint: alpha(f(x)) = m alpha(x),
// alpha'(p) = 1.  Attracting ends use forward orbits, repelling ends inverse
// orbits.  Refuses multiplier 1.
struct LinearizerGrid {
    double endpoint = 0.0;
    double multiplier = 1.0;
    std::vector<double> xs, values;
    double residual = 0.0;  // sup |alpha(f(x)) - m alpha(x)| over the grid
    int max_iterations = 0;

    double eval(double x) const;  // fresh orbit-limit evaluation
    const Diffeo* source = nullptr;
};
LinearizerGrid linearizer(const Diffeo& f, double endpoint, double win_lo, double win_hi,
                          double tol = 1e-13, int samples = 64);

// Robbin modulus gamma = beta ∘ alpha^{-1} of a compact gap with two
// hyperbolic ends; alpha linearizes at the repelling end c, beta at the
// attracting end d, both normalized to unit derivative and positive values.
struct Modulus {
    std::vector<double> ts, values;  // gamma on a log-spaced window
    double mult_c = 0.0, mult_d = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
};
Modulus robbin_modulus(const Diffeo& f, const Gap& gap, int samples = 48);

// pointwise equality of the normalized moduli on the common window
struct ModulusComparison {
    bool comparable = false;  // windows overlap and multipliers match
    bool equal = false;
    double residual = 0.0;  // sup |log gamma_a - log gamma_b|
};
ModulusComparison modulus_equal(const Modulus& a, const Modulus& b, double tol);

// equality up to the rescaling gamma(t) -> c gamma(t/e) induced by the end
// derivatives of a conjugating map; this is the conjugacy-invariant test
struct ModulusMatch {
    bool comparable = false;
    bool equivalent = false;
    double residual = 0.0;
    double log_c = 0.0, log_e = 0.0;  // fitted rescaling
};
ModulusMatch modulus_equivalent(const Modulus& a, const Modulus& b, double tol);

// conventional multiplier u_+(x) = lim (f^n(x) - f^n(a)) / (f^{n+1}(a) - f^n(a))
// (direction < 0 uses backward orbits); refuses flat ends.
struct MultiplierGrid {
    bool refused = false;
    std::string note;
    double a = 0.0;
    std::vector<double> xs, values;
    double eval_tol = 0.0;  // stopping resolution actually reached
};
MultiplierGrid conventional_multiplier(const Diffeo& f, const Gap& gap, double a,
                                       int direction, int samples = 33,
                                       long long n_cap = 2'000'000);

}  // namespace ivd
