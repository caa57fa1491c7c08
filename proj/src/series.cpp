#include "ivd/series.hpp"

#include <cmath>
#include <sstream>
#include <cctype>

#include "ivd/errors.hpp"

namespace ivd {

// ------ rational helpers ------ //

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw NumericError("zero denominator in rational literal");
    return Rational(num, den);
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

Rational rational_from_double(double x) {
    if (x == 0.0) return Rational(0);
    if (!std::isfinite(x)) throw NumericError("cannot convert non-finite double to rational");
    int exp2 = 0;
    double m = std::frexp(x, &exp2);  // x = m * 2^exp2, 0.5 <= |m| < 1
    // 53 doublings make the mantissa integral
    BigInt mant(static_cast<long long>(std::ldexp(m, 53)));
    exp2 -= 53;
    Rational r(mant);
    if (exp2 > 0) r *= Rational(BigInt(1) << exp2);
    else if (exp2 < 0) r /= Rational(BigInt(1) << (-exp2));
    return r;
}

Rational snap_rational(double x, double tol) {
    // continued-fraction convergents
    double a = x;
    BigInt p0(0), q0(1), p1(1), q1(0);
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(a);
        if (fl > 9e17 || fl < -9e17) break;
        BigInt ai(static_cast<long long>(fl));
        BigInt p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= tol) return Rational(p1, q1);
        double frac = a - fl;
        if (frac < 1e-18) break;
        a = 1.0 / frac;
    }
    return rational_from_double(x);
}

double to_double(const Rational& r) {
    return static_cast<double>(r);
}

// ------ series basics ------ //

FormalSeries FormalSeries::identity(int order) {
    FormalSeries s(order);
    s.coeff(1) = 1;
    return s;
}

bool FormalSeries::is_identity() const {
    if (c_[0] != 1) return false;
    for (std::size_t k = 1; k < c_.size(); ++k)
        if (c_[k] != 0) return false;
    return true;
}

FormalSeries FormalSeries::truncated(int order) const {
    FormalSeries s(order);
    for (int k = 1; k <= order && k <= this->order(); ++k) s.coeff(k) = coeff(k);
    return s;
}

std::string FormalSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (int k = 1; k <= order(); ++k) {
        const Rational& a = coeff(k);
        if (a == 0) continue;
        Rational mag = a < 0 ? Rational(-a) : a;
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        if (mag != 1 || k == 0) os << mag;
        os << "X";
        if (k != 1) os << "^" << k;
    }
    if (first) os << "0";
    return os.str();
}

FormalSeries FormalSeries::parse(const std::string& text, int order) {
    FormalSeries s(order);
    std::size_t i = 0;
    auto skip = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    bool first = true;
    while (true) {
        skip();
        if (i >= text.size()) break;
        int sign = 1;
        if (text[i] == '+') { ++i; }
        else if (text[i] == '-') { sign = -1; ++i; }
        else if (!first) throw ParseError(i, "expected '+' or '-' between series terms");
        skip();
        // coefficient (optional)
        Rational coeff(1);
        bool have_coeff = false;
        if (i < text.size() && text[i] == '(') {
            std::size_t close = text.find(')', i);
            if (close == std::string::npos) throw ParseError(i, "unclosed '(' in coefficient");
            coeff = parse_rational(text.substr(i + 1, close - i - 1));
            i = close + 1;
            have_coeff = true;
        } else if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '/'))
                ++i;
            coeff = parse_rational(text.substr(start, i - start));
            have_coeff = true;
        }
        if (sign < 0) coeff = -coeff;
        skip();
        if (i < text.size() && text[i] == '*') { ++i; skip(); }
        int power = 0;
        if (i < text.size() && (text[i] == 'X' || text[i] == 'x')) {
            ++i;
            power = 1;
            skip();
            if (i < text.size() && text[i] == '^') {
                ++i;
                skip();
                std::size_t start = i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                if (start == i) throw ParseError(i, "expected exponent");
                power = std::stoi(text.substr(start, i - start));
            }
        }
        if (power == 0) {
            if (!have_coeff) throw ParseError(i, "expected term");
            if (coeff != 0) throw ParseError(i, "series must have no constant term");
        } else if (power <= order) {
            s.coeff(power) += coeff;
        }
        first = false;
    }
    return s;
}

FormalSeries operator+(const FormalSeries& p, const FormalSeries& q) {
    FormalSeries r(p.order());
    for (int k = 1; k <= p.order(); ++k) r.coeff(k) = p.coeff(k) + q.coeff(k);
    return r;
}

FormalSeries operator-(const FormalSeries& p, const FormalSeries& q) {
    FormalSeries r(p.order());
    for (int k = 1; k <= p.order(); ++k) r.coeff(k) = p.coeff(k) - q.coeff(k);
    return r;
}

FormalSeries operator*(const Rational& s, const FormalSeries& p) {
    FormalSeries r(p.order());
    for (int k = 1; k <= p.order(); ++k) r.coeff(k) = s * p.coeff(k);
    return r;
}

FormalSeries compose(const FormalSeries& p, const FormalSeries& q) {
    const int N = p.order();
    if (q.order() != N) throw NumericError("compose: mismatched truncation orders");
    // Horner: result = (((a_N q + a_{N-1}) q + ...) q), all products truncated
    std::vector<Rational> acc(N + 1, Rational(0));  // polynomial with X^1..X^N slots; acc[0] = constant
    acc[0] = p.coeff(N);
    for (int k = N - 1; k >= 1; --k) {
        // acc = acc * q (+ a_k)
        std::vector<Rational> next(N + 1, Rational(0));
        for (int i = 0; i <= N; ++i) {
            if (acc[i] == 0) continue;
            if (i == 0) {
                // constant * q
                for (int j = 1; j <= N; ++j)
                    if (q.coeff(j) != 0) next[j] += acc[0] * q.coeff(j);
            } else {
                for (int j = 1; i + j <= N; ++j)
                    if (q.coeff(j) != 0) next[i + j] += acc[i] * q.coeff(j);
            }
        }
        next[0] = p.coeff(k);
        acc = std::move(next);
    }
    // final multiply by q to account for the leading factor
    FormalSeries r(N);
    for (int i = 0; i <= N; ++i) {
        if (acc[i] == 0) continue;
        if (i == 0) {
            for (int j = 1; j <= N; ++j)
                if (q.coeff(j) != 0) r.coeff(j) += acc[0] * q.coeff(j);
        } else {
            for (int j = 1; i + j <= N; ++j)
                if (q.coeff(j) != 0) r.coeff(i + j) += acc[i] * q.coeff(j);
        }
    }
    return r;
}

FormalSeries invert(const FormalSeries& p) {
    const int N = p.order();
    if (!p.invertible()) throw NumericError("invert: series has zero linear coefficient");
    FormalSeries w(N);
    w.coeff(1) = Rational(1) / p.coeff(1);
    for (int k = 2; k <= N; ++k) {
        // choose w_k so that [p∘w]_k = 0
        FormalSeries t = compose(p, w);
        w.coeff(k) = -t.coeff(k) / p.coeff(1);
        // [p∘w]_k depends on w_k through the linear term a1*w_k only
    }
    return w;
}

FormalSeries square(const FormalSeries& p) { return compose(p, p); }

bool is_involutive_jet(const FormalSeries& p) {
    return square(p).is_identity();
}

FormalSeries conjugate(const FormalSeries& q, const FormalSeries& h) {
    return compose(invert(h), compose(q, h));
}

// ------ normal forms ------ //

bool NormalForm::operator==(const NormalForm& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Hyperbolic: return lambda == o.lambda;
        case Kind::Parabolic:
            if (p != o.p || alpha != o.alpha || sigma1 != o.sigma1) return false;
            // a dilation c flips sign(a) exactly when p is odd (c < 0 allowed)
            if (p % 2 == 0 && sigma2 != o.sigma2) return false;
            return true;
        default: return true;
    }
}

std::string NormalForm::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Hyperbolic: os << "hyperbolic(" << lambda << "X)"; break;
        case Kind::Parabolic:
            os << "parabolic(p=" << p << ", X " << (sigma2 > 0 ? "+" : "-") << " X^" << (p + 1)
               << " + (" << alpha << ")X^" << (2 * p + 1) << ")";
            break;
        case Kind::FlatToOrderN: os << "flat-to-order-N"; break;
        case Kind::Identity: os << "identity"; break;
    }
    return os.str();
}

namespace {

FormalSeries linear_series(int order, const Rational& c) {
    FormalSeries s(order);
    s.coeff(1) = c;
    return s;
}

// witness solving W^{-1} P W = lambda X for hyperbolic P
FormalSeries linearizing_witness(const FormalSeries& p) {
    const int N = p.order();
    const Rational& lambda = p.coeff(1);
    FormalSeries w = FormalSeries::identity(N);
    Rational lk = lambda;
    for (int k = 2; k <= N; ++k) {
        lk *= lambda;  // lambda^k
        // want [P∘W]_k = [W∘(lambda X)]_k = lambda^k w_k;
        // with w_k = 0, [P∘W]_k = A_k and the true equation is
        // lambda w_k + A_k = lambda^k w_k
        FormalSeries t = compose(p, w);
        w.coeff(k) = t.coeff(k) / (lk - lambda);
    }
    return w;
}

}  // namespace

Classified normal_form(const FormalSeries& p) {
    const int N = p.order();
    if (!p.invertible()) throw NumericError("normal_form: series not invertible");
    const Rational lambda = p.coeff(1);

    if (lambda == -1)
        throw NumericError("normal_form: multiplier -1; classify through square()");

    if (lambda != 1) {
        Classified c;
        c.form.kind = NormalForm::Kind::Hyperbolic;
        c.form.lambda = lambda;
        c.witness = linearizing_witness(p);
        return c;
    }

    // multiplier 1: find the tangency order
    int p_ord = 0;
    for (int k = 2; k <= N; ++k) {
        if (p.coeff(k) != 0) { p_ord = k - 1; break; }
    }
    if (p_ord == 0) {
        Classified c;
        c.form.kind = NormalForm::Kind::FlatToOrderN;
        c.witness = FormalSeries::identity(N);
        return c;
    }
    if (2 * p_ord + 1 > N)
        throw NumericError("normal_form: truncation order " + std::to_string(N) +
                           " cannot resolve the resonant coefficient for p=" +
                           std::to_string(p_ord) + "; raise the order");

    // eliminate every non-resonant term above X^{p+1}, lowest order first
    FormalSeries cur = p;
    FormalSeries w = FormalSeries::identity(N);
    const Rational a = p.coeff(p_ord + 1);
    for (int m = p_ord + 2; m <= N; ++m) {
        if (m == 2 * p_ord + 1) continue;
        if (cur.coeff(m) == 0) continue;
        int k = m - p_ord;
        // conjugating by X + t X^k shifts [.]_m by a*(p+1-k)*t and
        // leaves lower orders alone
        Rational denom = a * Rational(p_ord + 1 - k);
        FormalSeries h = FormalSeries::identity(N);
        h.coeff(k) = -cur.coeff(m) / denom;
        cur = conjugate(cur, h);
        w = compose(w, h);
        if (cur.coeff(m) != 0) throw NumericError("normal_form: elimination failed (internal)");
    }

    Classified c;
    c.form.kind = NormalForm::Kind::Parabolic;
    c.form.p = p_ord;
    c.form.sigma1 = +1;
    c.form.sigma2 = (a > 0) ? +1 : -1;
    if (p_ord % 2 == 1) c.form.sigma2 = +1;  // sign removable by a (possibly negative) dilation
    c.form.alpha = cur.coeff(2 * p_ord + 1) / (a * a);
    c.witness = w;
    return c;
}

namespace {

// exact integer p-th root, or nullopt
std::optional<BigInt> int_root(const BigInt& v, int p) {
    if (v == 0) return BigInt(0);
    BigInt x = v;
    bool neg = x < 0;
    if (neg) {
        if (p % 2 == 0) return std::nullopt;
        x = -x;
    }
    BigInt lo(1), hi(1);
    while (boost::multiprecision::pow(hi, p) < x) hi <<= 1;
    while (lo < hi) {
        BigInt mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, p) < x) lo = mid + 1;
        else hi = mid;
    }
    if (boost::multiprecision::pow(lo, p) != x) return std::nullopt;
    return neg ? BigInt(-lo) : lo;
}

std::optional<Rational> rational_root(const Rational& v, int p) {
    auto n = int_root(boost::multiprecision::numerator(v), p);
    auto d = int_root(boost::multiprecision::denominator(v), p);
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
}

}  // namespace

ConjugacyWitness are_conjugate(const FormalSeries& p, const FormalSeries& q) {
    const int N = p.order();
    if (q.order() != N) throw NumericError("are_conjugate: mismatched truncation orders");
    Classified cp = normal_form(p);
    Classified cq = normal_form(q);
    ConjugacyWitness out;

    if (cp.form.kind == NormalForm::Kind::FlatToOrderN &&
        cq.form.kind == NormalForm::Kind::FlatToOrderN) {
        // flat germs carry no jet obstruction at this truncation
        out.conjugate = true;
        out.undetermined_flat = true;
        out.witness = FormalSeries::identity(N);
        return out;
    }
    if (!(cp.form == cq.form)) {
        out.conjugate = false;
        return out;
    }
    out.conjugate = true;

    if (cp.form.kind == NormalForm::Kind::Hyperbolic) {
        out.witness = compose(cq.witness, invert(cp.witness));
        return out;
    }
    // parabolic: reduced forms X + a X^{p+1} + b X^{2p+1}; connect by a
    // dilation cX with a_p = a_q c^p, rational when a_p/a_q has a rational
    // p-th root (otherwise the witness exists only over the reals)
    int pp = cp.form.p;
    FormalSeries rp = conjugate(p, cp.witness);
    FormalSeries rq = conjugate(q, cq.witness);
    Rational ratio = rp.coeff(pp + 1) / rq.coeff(pp + 1);
    auto c = rational_root(ratio, pp);
    if (c && *c != 0) {
        // q = Wq rq Wq^{-1}, rp = (cX)^{-1} rq (cX), p = Wp rp Wp^{-1}
        FormalSeries h = compose(cq.witness, compose(linear_series(N, *c), invert(cp.witness)));
        out.witness = h;
    }
    return out;
}

CentralizerDescriptor centralizer(const FormalSeries& p) {
    Classified c = normal_form(p);
    CentralizerDescriptor d;
    switch (c.form.kind) {
        case NormalForm::Kind::Hyperbolic:
            d.kind = CentralizerDescriptor::Kind::FullLinear;
            break;
        case NormalForm::Kind::Parabolic:
            d.kind = CentralizerDescriptor::Kind::OneParameterParabolic;
            d.p = c.form.p;
            break;
        default:
            d.kind = CentralizerDescriptor::Kind::TrivialJet;
            break;
    }
    return d;
}

}  // namespace ivd
