#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ivd/rational.hpp"

namespace ivd {

// Truncated formal power series a1 X + a2 X^2 + ... + aN X^N with exact
// rational coefficients and no constant term (these are series of maps
// fixing the origin).
class FormalSeries {
public:
    explicit FormalSeries(int order = 12) : c_(order, Rational(0)) {}
    FormalSeries(std::initializer_list<Rational> coeffs) : c_(coeffs) {}
    static FormalSeries identity(int order);

    // literal syntax: "X + 5X^4 + 50X^7", coefficients integer or "p/q"
    static FormalSeries parse(const std::string& text, int order);

    int order() const { return static_cast<int>(c_.size()); }
    // coefficient of X^k, 1-based
    const Rational& coeff(int k) const { return c_[k - 1]; }
    Rational& coeff(int k) { return c_[k - 1]; }

    bool invertible() const { return c_[0] != 0; }
    bool is_identity() const;

    FormalSeries truncated(int order) const;
    std::string str() const;

    bool operator==(const FormalSeries& o) const { return c_ == o.c_; }

private:
    std::vector<Rational> c_;
};

FormalSeries operator+(const FormalSeries& p, const FormalSeries& q);
FormalSeries operator-(const FormalSeries& p, const FormalSeries& q);
FormalSeries operator*(const Rational& s, const FormalSeries& p);

// P∘Q mod X^{N+1}; both at the same truncation order.
FormalSeries compose(const FormalSeries& p, const FormalSeries& q);

// compositional inverse: compose(p, invert(p)) = X; requires a1 != 0
FormalSeries invert(const FormalSeries& p);

FormalSeries square(const FormalSeries& p);
bool is_involutive_jet(const FormalSeries& p);

// conjugation q^h = h^{-1} ∘ q ∘ h
FormalSeries conjugate(const FormalSeries& q, const FormalSeries& h);

struct NormalForm {
    enum class Kind { Hyperbolic, Parabolic, FlatToOrderN, Identity };
    Kind kind;
    // Hyperbolic: multiplier
    Rational lambda;
    // Parabolic: X + a X^{p+1} + b X^{2p+1} reduced data.  sigma2 is the sign
    // of a, only a conjugacy invariant when p is even; alpha = b/a^2 always is.
    int p = 0;
    int sigma1 = +1;
    int sigma2 = +1;
    Rational alpha;
    // order of tangency actually resolved (diagnostics)
    std::string describe() const;

    bool operator==(const NormalForm& o) const;
};

// Classification of an invertible series up to formal conjugacy, plus a
// witness W with W^{-1}∘P∘W in reduced form.  For Parabolic the witness
// reaches X + a X^{p+1} + b X^{2p+1}; the final dilation making a = ±1 can
// be irrational and is left symbolic in the invariants (p, sigma2, alpha).
// Throws NumericError for multiplier -1 (handled upstream through square()).
struct Classified {
    NormalForm form;
    FormalSeries witness;
};
Classified normal_form(const FormalSeries& p);

struct ConjugacyWitness {
    bool conjugate = false;
    bool undetermined_flat = false;  // both flat to order N: no jet obstruction
    std::optional<FormalSeries> witness;  // present when a rational witness exists
};
ConjugacyWitness are_conjugate(const FormalSeries& p, const FormalSeries& q);

struct CentralizerDescriptor {
    enum class Kind { FullLinear, OneParameterParabolic, TrivialJet };
    Kind kind;
    int p = 0;  // OneParameterParabolic
};
CentralizerDescriptor centralizer(const FormalSeries& p);

}  // namespace ivd
