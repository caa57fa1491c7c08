#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ivd/jet.hpp"

namespace ivd {

enum class NodeKind : uint8_t {
    Constant, Variable, Neg, Add, Sub, Mul, Div, PowConst,
    Exp, Log, Sin, Cos, Sqrt, Flat0,
};

struct ExprNode {
    NodeKind kind;
    int32_t a = -1, b = -1;        // child indices
    double value = 0.0;            // Constant
    long long pnum = 0, pden = 1;  // PowConst exponent
    uint32_t pos = 0;              // byte offset in the source, for error reports
    std::string literal;           // Constant: original spelling, kept for printing
};

// Immutable expression tree of one variable.  Values are cheap to copy and
// safe to share across threads.
class Expr {
public:
    Expr() = default;

    static Expr parse(const std::string& source);

    std::string print() const;
    std::string print_subtree(int node) const;

    // IEEE evaluation; throws DomainError when the result is not finite.
    double eval(double x) const;

    // value plus first (and second) derivative in one pass
    void eval_d1(double x, double& v, double& d1) const;
    void eval_d2(double x, double& v, double& d1, double& d2) const;

    // Taylor coefficients at a of the function, up to order K.
    Jet eval_jet(double a, int K) const;

    // Jet of this function composed with an inner jet (base point = xjet[0]).
    Jet eval_jet_arg(const Jet& xjet) const;

    // k-th derivative at x
    double derivative(double x, int k) const;

    // If the tree is literally x + r, r + x, or x - r, returns the node index
    // of r and sets sign so the displacement is sign * r(x); else -1.  Gives
    // cancellation-free access to f(x) - x for nearly-flat maps.
    int displacement_subtree(int& sign) const;
    double eval_subtree_value(int node, double x) const { return eval_subtree_ieee(node, x); }

    bool empty() const { return !shared_ || shared_->nodes.empty(); }
    const std::string& source() const { return shared_->source; }
    const std::vector<ExprNode>& nodes() const { return shared_->nodes; }
    int root() const { return shared_->root; }

private:
    struct Shared {
        std::vector<ExprNode> nodes;
        int root = -1;
        std::string source;
        std::vector<int32_t> postorder;  // flattened program for the fast paths
    };
    std::shared_ptr<const Shared> shared_;

    friend struct ExprBuilder;
    explicit Expr(std::shared_ptr<const Shared> s) : shared_(std::move(s)) {}

    Jet eval_jet_node(int node, const Jet& xjet) const;
    double eval_subtree_ieee(int node, double x) const;
};

}  // namespace ivd
