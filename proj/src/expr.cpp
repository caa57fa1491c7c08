#include "ivd/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "ivd/errors.hpp"

namespace ivd {

// ------ parsing ------ //

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;
    std::vector<ExprNode> nodes;

    explicit Parser(const std::string& src) : s(src) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool peek(char c) {
        skip_ws();
        return i < s.size() && s[i] == c;
    }
    bool accept(char c) {
        if (peek(c)) { ++i; return true; }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(i, std::string("expected ") + what);
    }

    int add(ExprNode n) {
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int make1(NodeKind k, int a, uint32_t pos) {
        ExprNode n;
        n.kind = k; n.a = a; n.pos = pos;
        return add(std::move(n));
    }
    int make2(NodeKind k, int a, int b, uint32_t pos) {
        ExprNode n;
        n.kind = k; n.a = a; n.b = b; n.pos = pos;
        return add(std::move(n));
    }

    long long integer() {
        skip_ws();
        std::size_t start = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw ParseError(i, "expected integer");
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        return std::strtoll(s.c_str() + start, nullptr, 10);
    }

    // rational := integer | '(' integer '/' integer ')'
    void rational(long long& num, long long& den) {
        skip_ws();
        if (accept('(')) {
            num = integer();
            expect('/', "'/' in rational exponent");
            den = integer();
            expect(')', "')' after rational exponent");
            if (den == 0) throw ParseError(i, "zero denominator in exponent");
            if (den < 0) { den = -den; num = -num; }
        } else {
            num = integer();
            den = 1;
        }
    }

    int number() {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i < s.size() && s[i] == '.') {
            ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            std::size_t save = i;
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            } else {
                i = save;  // 'e' was not an exponent
            }
        }
        ExprNode n;
        n.kind = NodeKind::Constant;
        n.literal = s.substr(start, i - start);
        n.value = std::strtod(n.literal.c_str(), nullptr);
        n.pos = static_cast<uint32_t>(start);
        return add(std::move(n));
    }

    int atom() {
        skip_ws();
        if (i >= s.size()) throw ParseError(i, "unexpected end of input");
        uint32_t pos = static_cast<uint32_t>(i);
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++i;
            int e = expr();
            expect(')', "')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            std::string ident = s.substr(start, i - start);
            if (ident == "x") {
                ExprNode n;
                n.kind = NodeKind::Variable;
                n.pos = pos;
                return add(std::move(n));
            }
            NodeKind k;
            if (ident == "exp") k = NodeKind::Exp;
            else if (ident == "log") k = NodeKind::Log;
            else if (ident == "sin") k = NodeKind::Sin;
            else if (ident == "cos") k = NodeKind::Cos;
            else if (ident == "sqrt") k = NodeKind::Sqrt;
            else if (ident == "flat0") k = NodeKind::Flat0;
            else throw ParseError(start, "unknown identifier '" + ident + "'");
            expect('(', "'(' after function name");
            int arg = expr();
            expect(')', "')'");
            return make1(k, arg, pos);
        }
        throw ParseError(i, "unexpected character");
    }

    // power := atom ('^' rational)?
    int power() {
        int base = atom();
        skip_ws();
        if (accept('^')) {
            uint32_t pos = static_cast<uint32_t>(i);
            long long num, den;
            rational(num, den);
            ExprNode n;
            n.kind = NodeKind::PowConst;
            n.a = base;
            n.pnum = num;
            n.pden = den;
            n.pos = pos;
            return add(std::move(n));
        }
        return base;
    }

    // factor := '-'? power
    int factor() {
        skip_ws();
        uint32_t pos = static_cast<uint32_t>(i);
        if (accept('-')) return make1(NodeKind::Neg, factor(), pos);
        return power();
    }

    int term() {
        int e = factor();
        for (;;) {
            skip_ws();
            uint32_t pos = static_cast<uint32_t>(i);
            if (accept('*')) e = make2(NodeKind::Mul, e, factor(), pos);
            else if (accept('/')) e = make2(NodeKind::Div, e, factor(), pos);
            else return e;
        }
    }

    int expr() {
        int e = term();
        for (;;) {
            skip_ws();
            uint32_t pos = static_cast<uint32_t>(i);
            if (accept('+')) e = make2(NodeKind::Add, e, term(), pos);
            else if (accept('-')) e = make2(NodeKind::Sub, e, term(), pos);
            else return e;
        }
    }
};

void build_postorder(const std::vector<ExprNode>& nodes, int root, std::vector<int32_t>& out) {
    const ExprNode& n = nodes[root];
    if (n.a >= 0) build_postorder(nodes, n.a, out);
    if (n.b >= 0) build_postorder(nodes, n.b, out);
    out.push_back(root);
}

}  // namespace

struct ExprBuilder {
    static Expr finish(std::vector<ExprNode> nodes, int root, std::string source) {
        auto sh = std::make_shared<Expr::Shared>();
        sh->nodes = std::move(nodes);
        sh->root = root;
        sh->source = std::move(source);
        build_postorder(sh->nodes, root, sh->postorder);
        return Expr(std::move(sh));
    }
};

Expr Expr::parse(const std::string& source) {
    Parser p(source);
    int root = p.expr();
    p.skip_ws();
    if (p.i != source.size()) throw ParseError(p.i, "trailing input");
    return ExprBuilder::finish(std::move(p.nodes), root, source);
}

// ------ printing ------ //

namespace {

int precedence(NodeKind k) {
    switch (k) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::PowConst: return 4;
        default: return 5;
    }
}

void print_node(const std::vector<ExprNode>& nodes, int idx, int parent_prec,
                bool right_operand, std::string& out) {
    const ExprNode& n = nodes[idx];
    int prec = precedence(n.kind);
    bool parens = prec < parent_prec || (prec == parent_prec && right_operand && prec <= 2);
    if (parens) out += '(';
    switch (n.kind) {
        case NodeKind::Constant: out += n.literal.empty() ? std::to_string(n.value) : n.literal; break;
        case NodeKind::Variable: out += 'x'; break;
        case NodeKind::Neg:
            out += '-';
            print_node(nodes, n.a, prec, true, out);
            break;
        case NodeKind::Add:
            print_node(nodes, n.a, prec, false, out);
            out += " + ";
            print_node(nodes, n.b, prec, true, out);
            break;
        case NodeKind::Sub:
            print_node(nodes, n.a, prec, false, out);
            out += " - ";
            print_node(nodes, n.b, prec, true, out);
            break;
        case NodeKind::Mul:
            print_node(nodes, n.a, prec, false, out);
            out += "*";
            print_node(nodes, n.b, prec, true, out);
            break;
        case NodeKind::Div:
            print_node(nodes, n.a, prec, false, out);
            out += "/";
            print_node(nodes, n.b, prec, true, out);
            break;
        case NodeKind::PowConst:
            print_node(nodes, n.a, prec + 1, false, out);
            out += '^';
            if (n.pden == 1) {
                out += std::to_string(n.pnum);
            } else {
                out += '(' + std::to_string(n.pnum) + '/' + std::to_string(n.pden) + ')';
            }
            break;
        case NodeKind::Exp: out += "exp("; print_node(nodes, n.a, 0, false, out); out += ')'; break;
        case NodeKind::Log: out += "log("; print_node(nodes, n.a, 0, false, out); out += ')'; break;
        case NodeKind::Sin: out += "sin("; print_node(nodes, n.a, 0, false, out); out += ')'; break;
        case NodeKind::Cos: out += "cos("; print_node(nodes, n.a, 0, false, out); out += ')'; break;
        case NodeKind::Sqrt: out += "sqrt("; print_node(nodes, n.a, 0, false, out); out += ')'; break;
        case NodeKind::Flat0: out += "flat0("; print_node(nodes, n.a, 0, false, out); out += ')'; break;
    }
    if (parens) out += ')';
}

}  // namespace

std::string Expr::print() const { return print_subtree(shared_->root); }

std::string Expr::print_subtree(int node) const {
    std::string out;
    print_node(shared_->nodes, node, 0, false, out);
    return out;
}

// ------ fast double evaluation ------ //

namespace {

inline double pow_rational(double base, long long num, long long den) {
    if (den == 1) {
        // integer exponent: valid for any base (nonzero if negative exponent)
        return std::pow(base, static_cast<double>(num));
    }
    return std::pow(base, static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

double Expr::eval(double x) const {
    const auto& nodes = shared_->nodes;
    const auto& order = shared_->postorder;
    // stack-free: one slot per node (trees here are tiny)
    double vals[256];
    std::vector<double> heap;
    double* v = vals;
    if (nodes.size() > 256) {
        heap.resize(nodes.size());
        v = heap.data();
    }
    for (int32_t idx : order) {
        const ExprNode& n = nodes[idx];
        switch (n.kind) {
            case NodeKind::Constant: v[idx] = n.value; break;
            case NodeKind::Variable: v[idx] = x; break;
            case NodeKind::Neg: v[idx] = -v[n.a]; break;
            case NodeKind::Add: v[idx] = v[n.a] + v[n.b]; break;
            case NodeKind::Sub: v[idx] = v[n.a] - v[n.b]; break;
            case NodeKind::Mul: v[idx] = v[n.a] * v[n.b]; break;
            case NodeKind::Div: v[idx] = v[n.a] / v[n.b]; break;
            case NodeKind::PowConst: v[idx] = pow_rational(v[n.a], n.pnum, n.pden); break;
            case NodeKind::Exp: v[idx] = std::exp(v[n.a]); break;
            case NodeKind::Log: v[idx] = std::log(v[n.a]); break;
            case NodeKind::Sin: v[idx] = std::sin(v[n.a]); break;
            case NodeKind::Cos: v[idx] = std::cos(v[n.a]); break;
            case NodeKind::Sqrt: v[idx] = std::sqrt(v[n.a]); break;
            case NodeKind::Flat0: v[idx] = (x == 0.0) ? 0.0 : v[n.a]; break;
        }
    }
    double r = v[shared_->root];
    if (!std::isfinite(r)) {
        // locate the first non-finite subresult for the report
        for (int32_t idx : order) {
            if (!std::isfinite(v[idx]))
                throw DomainError("evaluation produced a non-finite value", print_subtree(idx));
        }
        throw DomainError("evaluation produced a non-finite value", print());
    }
    return r;
}

void Expr::eval_d1(double x, double& val, double& der) const {
    const auto& nodes = shared_->nodes;
    const auto& order = shared_->postorder;
    double v[128], d[128];
    std::vector<double> hv, hd;
    double *pv = v, *pd = d;
    if (nodes.size() > 128) {
        hv.resize(nodes.size());
        hd.resize(nodes.size());
        pv = hv.data();
        pd = hd.data();
    }
    for (int32_t idx : order) {
        const ExprNode& n = nodes[idx];
        switch (n.kind) {
            case NodeKind::Constant: pv[idx] = n.value; pd[idx] = 0.0; break;
            case NodeKind::Variable: pv[idx] = x; pd[idx] = 1.0; break;
            case NodeKind::Neg: pv[idx] = -pv[n.a]; pd[idx] = -pd[n.a]; break;
            case NodeKind::Add: pv[idx] = pv[n.a] + pv[n.b]; pd[idx] = pd[n.a] + pd[n.b]; break;
            case NodeKind::Sub: pv[idx] = pv[n.a] - pv[n.b]; pd[idx] = pd[n.a] - pd[n.b]; break;
            case NodeKind::Mul:
                pv[idx] = pv[n.a] * pv[n.b];
                pd[idx] = pd[n.a] * pv[n.b] + pv[n.a] * pd[n.b];
                break;
            case NodeKind::Div: {
                double inv = 1.0 / pv[n.b];
                pv[idx] = pv[n.a] * inv;
                pd[idx] = (pd[n.a] - pv[idx] * pd[n.b]) * inv;
                break;
            }
            case NodeKind::PowConst: {
                double u = pv[n.a];
                double r = static_cast<double>(n.pnum) / static_cast<double>(n.pden);
                double w = pow_rational(u, n.pnum, n.pden);
                pv[idx] = w;
                if (u != 0.0) pd[idx] = r * w / u * pd[n.a];
                else if (n.pden == 1 && n.pnum > 1) pd[idx] = (n.pnum == 1) ? pd[n.a] : 0.0;
                else if (n.pden == 1 && n.pnum == 1) pd[idx] = pd[n.a];
                else pd[idx] = r * std::pow(u, r - 1.0) * pd[n.a];
                break;
            }
            case NodeKind::Exp: {
                double w = std::exp(pv[n.a]);
                pv[idx] = w;
                pd[idx] = w * pd[n.a];
                if (w == 0.0) pd[idx] = 0.0;  // flat limit
                break;
            }
            case NodeKind::Log:
                pv[idx] = std::log(pv[n.a]);
                pd[idx] = pd[n.a] / pv[n.a];
                break;
            case NodeKind::Sin:
                pv[idx] = std::sin(pv[n.a]);
                pd[idx] = std::cos(pv[n.a]) * pd[n.a];
                break;
            case NodeKind::Cos:
                pv[idx] = std::cos(pv[n.a]);
                pd[idx] = -std::sin(pv[n.a]) * pd[n.a];
                break;
            case NodeKind::Sqrt: {
                double w = std::sqrt(pv[n.a]);
                pv[idx] = w;
                pd[idx] = 0.5 / w * pd[n.a];
                break;
            }
            case NodeKind::Flat0:
                if (x == 0.0) { pv[idx] = 0.0; pd[idx] = 0.0; }
                else { pv[idx] = pv[n.a]; pd[idx] = pd[n.a]; }
                break;
        }
    }
    val = pv[shared_->root];
    der = pd[shared_->root];
    if (!std::isfinite(val) || !std::isfinite(der)) {
        Jet j = eval_jet(x, 1);  // throws a located DomainError or applies the flat rule
        val = j[0];
        der = j[1];
    }
}

void Expr::eval_d2(double x, double& val, double& d1, double& d2) const {
    Jet j = eval_jet(x, 2);
    val = j[0];
    d1 = j[1];
    d2 = 2.0 * j[2];
}

// ------ jet evaluation ------ //

double Expr::eval_subtree_ieee(int idx, double x) const {
    const ExprNode& n = shared_->nodes[idx];
    switch (n.kind) {
        case NodeKind::Constant: return n.value;
        case NodeKind::Variable: return x;
        case NodeKind::Neg: return -eval_subtree_ieee(n.a, x);
        case NodeKind::Add: return eval_subtree_ieee(n.a, x) + eval_subtree_ieee(n.b, x);
        case NodeKind::Sub: return eval_subtree_ieee(n.a, x) - eval_subtree_ieee(n.b, x);
        case NodeKind::Mul: return eval_subtree_ieee(n.a, x) * eval_subtree_ieee(n.b, x);
        case NodeKind::Div: return eval_subtree_ieee(n.a, x) / eval_subtree_ieee(n.b, x);
        case NodeKind::PowConst: return pow_rational(eval_subtree_ieee(n.a, x), n.pnum, n.pden);
        case NodeKind::Exp: return std::exp(eval_subtree_ieee(n.a, x));
        case NodeKind::Log: return std::log(eval_subtree_ieee(n.a, x));
        case NodeKind::Sin: return std::sin(eval_subtree_ieee(n.a, x));
        case NodeKind::Cos: return std::cos(eval_subtree_ieee(n.a, x));
        case NodeKind::Sqrt: return std::sqrt(eval_subtree_ieee(n.a, x));
        case NodeKind::Flat0: return (x == 0.0) ? 0.0 : eval_subtree_ieee(n.a, x);
    }
    return 0.0;
}

Jet Expr::eval_jet_node(int idx, const Jet& xjet) const {
    const ExprNode& n = shared_->nodes[idx];
    const int K = xjet.order();
    switch (n.kind) {
        case NodeKind::Constant: return Jet::constant(K, n.value);
        case NodeKind::Variable: return xjet;
        case NodeKind::Neg: return -eval_jet_node(n.a, xjet);
        case NodeKind::Add: return eval_jet_node(n.a, xjet) + eval_jet_node(n.b, xjet);
        case NodeKind::Sub: return eval_jet_node(n.a, xjet) - eval_jet_node(n.b, xjet);
        case NodeKind::Mul: return eval_jet_node(n.a, xjet) * eval_jet_node(n.b, xjet);
        case NodeKind::Div: {
            Jet num = eval_jet_node(n.a, xjet);
            Jet den = eval_jet_node(n.b, xjet);
            if (den[0] == 0.0)
                throw DomainError("division by zero", print_subtree(idx));
            return num / den;
        }
        case NodeKind::PowConst: {
            Jet base = eval_jet_node(n.a, xjet);
            if (n.pden == 1) {
                if (base[0] == 0.0 && n.pnum < 0)
                    throw DomainError("negative power of zero", print_subtree(idx));
                return jet_pow_int(base, n.pnum);
            }
            if (!(base[0] > 0.0))
                throw DomainError("non-integer power of non-positive base", print_subtree(idx));
            return jet_pow(base, static_cast<double>(n.pnum) / static_cast<double>(n.pden));
        }
        case NodeKind::Exp: {
            // Flat-limit rule: if the argument jet is singular at this point but
            // the IEEE value of the exp subtree is exactly 0 (argument -> -inf),
            // the subtree is flat here and the zero jet is the correct limit.
            try {
                return jet_exp(eval_jet_node(n.a, xjet));
            } catch (const DomainError&) {
                double sub = std::exp(eval_subtree_ieee(n.a, xjet[0]));
                if (sub == 0.0) return Jet::constant(K, 0.0);
                throw;
            }
        }
        case NodeKind::Log: {
            Jet u = eval_jet_node(n.a, xjet);
            if (!(u[0] > 0.0)) throw DomainError("log of non-positive value", print_subtree(idx));
            return jet_log(u);
        }
        case NodeKind::Sin: return jet_sin(eval_jet_node(n.a, xjet));
        case NodeKind::Cos: return jet_cos(eval_jet_node(n.a, xjet));
        case NodeKind::Sqrt: {
            Jet u = eval_jet_node(n.a, xjet);
            if (!(u[0] > 0.0)) throw DomainError("sqrt of non-positive value", print_subtree(idx));
            return jet_sqrt(u);
        }
        case NodeKind::Flat0:
            if (xjet[0] == 0.0) return Jet::constant(K, 0.0);
            return eval_jet_node(n.a, xjet);
    }
    throw NumericError("unreachable");
}

Jet Expr::eval_jet(double a, int K) const {
    return eval_jet_node(shared_->root, Jet::variable(K, a));
}

Jet Expr::eval_jet_arg(const Jet& xjet) const {
    return eval_jet_node(shared_->root, xjet);
}

double Expr::derivative(double x, int k) const {
    return eval_jet(x, k).derivative(k);
}

int Expr::displacement_subtree(int& sign) const {
    const auto& nodes = shared_->nodes;
    const ExprNode& r = nodes[shared_->root];
    if (r.kind == NodeKind::Add) {
        if (nodes[r.a].kind == NodeKind::Variable) { sign = +1; return r.b; }
        if (nodes[r.b].kind == NodeKind::Variable) { sign = +1; return r.a; }
    }
    if (r.kind == NodeKind::Sub && nodes[r.a].kind == NodeKind::Variable) {
        sign = -1;
        return r.b;
    }
    return -1;
}

}  // namespace ivd
