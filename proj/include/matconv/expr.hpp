#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "matconv/atoms.hpp"
#include "matconv/errors.hpp"
#include "matconv/order.hpp"
#include "matconv/symmat.hpp"

namespace matconv {

class ConvexMatrixExpr;
using ExprPtr = std::shared_ptr<const ConvexMatrixExpr>;

/// Node payloads. Every constructor preserves matrix convexity, so any tree
/// reachable through the mk_* factories is convex by construction.

/// F(x) = A.
struct ConstNode {
    SymMat value;
    int input_dim;
};

/// F(x) = sum_i x_i V^(i) + A0.
struct AffineNode {
    MatTuple coeffs;
    SymMat offset;
};

/// F(x) = f(x) * P with f a convex scalar atom and P PSD. Soundness via
/// scalarization: <z, F(x) z> = f(x) * <z, P z> with a nonnegative factor.
struct LiftNode {
    ScalarAtom atom;
    SymMat shape;
};

/// F1 + F2.
struct SumNode {
    ExprPtr lhs;
    ExprPtr rhs;
};

/// alpha * F, alpha >= 0.
struct ScaleNode {
    double alpha;
    ExprPtr child;
};

/// M F M^T. square_invertible records whether M is square with
/// |det M| > 1e-12; in that case the subgradient rule is an equality, not
/// just an inclusion.
struct CongruenceNode {
    DenseMat m;
    ExprPtr child;
    bool square_invertible;
};

/// M (.) F, entrywise, with M PSD (Schur product keeps the cone).
/// reciprocal_psd records whether every M_ij is nonzero and the entrywise
/// reciprocal is PSD, the known equality case of the rule.
struct HadamardNode {
    SymMat mask;
    ExprPtr child;
    bool reciprocal_psd;
};

/// G(y) = F(A y + b), A of shape child_d x m.
struct PrecomposeNode {
    ExprPtr child;
    DenseMat a;
    std::vector<double> b;
};

/// x -> blockdiag(F1(x), F2(x)).
struct BlockDiagNode {
    ExprPtr first;
    ExprPtr second;
};

/// G(x) = [[F(x), -F(x)], [-F(x), F(x)]].
struct DoubleNode {
    ExprPtr child;
};

using ExprNode = std::variant<ConstNode, AffineNode, LiftNode, SumNode, ScaleNode, CongruenceNode,
                              HadamardNode, PrecomposeNode, BlockDiagNode, DoubleNode>;

/// Immutable convex matrix-valued function F: R^d -> S^l. Construct through
/// the mk_* factories; the constructor validates every node invariant, so a
/// live instance is always well formed. Sharing subtrees is safe: nodes are
/// never mutated after construction.
class ConvexMatrixExpr {
public:
    explicit ConvexMatrixExpr(ExprNode node) : node_(std::move(node)) { validate(); }

    int input_dim() const { return input_dim_; }
    int output_dim() const { return output_dim_; }
    const ExprNode& node() const { return node_; }

private:
    void validate();

    ExprNode node_;
    int input_dim_ = 0;
    int output_dim_ = 0;
};

namespace detail {
inline void check_child(const ExprPtr& p, const char* where) {
    if (!p) throw PreconditionViolated(std::string(where) + ": child expression is null");
}

inline void check_dims_cap(int d, int l) {
    if (d < 1 || d > kMaxInputDim)
        throw DimensionMismatch("input dim must be in [1, " + std::to_string(kMaxInputDim) +
                                "], got " + std::to_string(d));
    if (l < 1 || l > kMaxMatrixDim)
        throw DimensionMismatch("output dim must be in [1, " + std::to_string(kMaxMatrixDim) +
                                "], got " + std::to_string(l));
}
}  // namespace detail

inline void ConvexMatrixExpr::validate() {
    std::visit(
        [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ConstNode>) {
                input_dim_ = n.input_dim;
                output_dim_ = n.value.dim();
            } else if constexpr (std::is_same_v<T, AffineNode>) {
                if (n.offset.dim() != n.coeffs.dim())
                    throw DimensionMismatch("affine: offset dim differs from coefficient dims");
                input_dim_ = n.coeffs.count();
                output_dim_ = n.coeffs.dim();
            } else if constexpr (std::is_same_v<T, LiftNode>) {
                PsdVerdict v = psd_verdict(n.shape);
                if (!v.psd) throw NotPsd("lift: shape matrix must be PSD", v.witness, v.min_eigenvalue);
                input_dim_ = atom_dim(n.atom);
                output_dim_ = n.shape.dim();
            } else if constexpr (std::is_same_v<T, SumNode>) {
                detail::check_child(n.lhs, "sum");
                detail::check_child(n.rhs, "sum");
                if (n.lhs->input_dim() != n.rhs->input_dim() || n.lhs->output_dim() != n.rhs->output_dim())
                    throw DimensionMismatch("sum: operands must share input and output dims");
                input_dim_ = n.lhs->input_dim();
                output_dim_ = n.lhs->output_dim();
            } else if constexpr (std::is_same_v<T, ScaleNode>) {
                detail::check_child(n.child, "scale");
                if (!std::isfinite(n.alpha) || n.alpha < 0.0)
                    throw NegativeScale("scale: factor must be finite and nonnegative, got " +
                                        std::to_string(n.alpha));
                input_dim_ = n.child->input_dim();
                output_dim_ = n.child->output_dim();
            } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                detail::check_child(n.child, "congruence");
                if (n.m.cols() != n.child->output_dim())
                    throw DimensionMismatch("congruence: M columns must equal child output dim");
                n.square_invertible = n.m.rows() == n.m.cols() && std::abs(n.m.det()) > 1e-12;
                input_dim_ = n.child->input_dim();
                output_dim_ = n.m.rows();
            } else if constexpr (std::is_same_v<T, HadamardNode>) {
                detail::check_child(n.child, "hadamard");
                if (n.mask.dim() != n.child->output_dim())
                    throw DimensionMismatch("hadamard: mask dim must equal child output dim");
                PsdVerdict v = psd_verdict(n.mask);
                if (!v.psd) throw NotPsd("hadamard: mask must be PSD", v.witness, v.min_eigenvalue);
                n.reciprocal_psd = [&] {
                    SymMat recip(n.mask.dim());
                    for (int i = 0; i < n.mask.dim(); ++i)
                        for (int j = i; j < n.mask.dim(); ++j) {
                            const double mij = n.mask.at(i, j);
                            if (mij == 0.0) return false;
                            recip.set(i, j, 1.0 / mij);
                        }
                    return psd_verdict(recip).psd;
                }();
                input_dim_ = n.child->input_dim();
                output_dim_ = n.mask.dim();
            } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                detail::check_child(n.child, "precompose");
                if (n.a.rows() != n.child->input_dim())
                    throw DimensionMismatch("precompose: A rows must equal child input dim");
                if (static_cast<int>(n.b.size()) != n.child->input_dim())
                    throw DimensionMismatch("precompose: offset length must equal child input dim");
                detail::check_finite_vec(n.b, "precompose offset");
                input_dim_ = n.a.cols();
                output_dim_ = n.child->output_dim();
            } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                detail::check_child(n.first, "blockdiag");
                detail::check_child(n.second, "blockdiag");
                if (n.first->input_dim() != n.second->input_dim())
                    throw DimensionMismatch("blockdiag: blocks must share the input dim");
                input_dim_ = n.first->input_dim();
                output_dim_ = n.first->output_dim() + n.second->output_dim();
            } else {
                static_assert(std::is_same_v<T, DoubleNode>);
                detail::check_child(n.child, "double");
                input_dim_ = n.child->input_dim();
                output_dim_ = 2 * n.child->output_dim();
            }
        },
        node_);
    detail::check_dims_cap(input_dim_, output_dim_);
}

/// Factories. Each returns a validated immutable expression.

inline ExprPtr mk_const(SymMat value, int input_dim) {
    return std::make_shared<const ConvexMatrixExpr>(ConstNode{std::move(value), input_dim});
}

inline ExprPtr mk_affine(MatTuple coeffs, SymMat offset) {
    return std::make_shared<const ConvexMatrixExpr>(AffineNode{std::move(coeffs), std::move(offset)});
}

inline ExprPtr mk_lift(ScalarAtom atom, SymMat shape) {
    return std::make_shared<const ConvexMatrixExpr>(LiftNode{std::move(atom), std::move(shape)});
}

inline ExprPtr mk_sum(ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const ConvexMatrixExpr>(SumNode{std::move(lhs), std::move(rhs)});
}

inline ExprPtr mk_scale(double alpha, ExprPtr child) {
    return std::make_shared<const ConvexMatrixExpr>(ScaleNode{alpha, std::move(child)});
}

inline ExprPtr mk_congruence(DenseMat m, ExprPtr child) {
    return std::make_shared<const ConvexMatrixExpr>(CongruenceNode{std::move(m), std::move(child), false});
}

inline ExprPtr mk_hadamard(SymMat mask, ExprPtr child) {
    return std::make_shared<const ConvexMatrixExpr>(HadamardNode{std::move(mask), std::move(child), false});
}

inline ExprPtr mk_precompose(ExprPtr child, DenseMat a, std::vector<double> b) {
    return std::make_shared<const ConvexMatrixExpr>(PrecomposeNode{std::move(child), std::move(a), std::move(b)});
}

inline ExprPtr mk_block_diag(ExprPtr first, ExprPtr second) {
    return std::make_shared<const ConvexMatrixExpr>(BlockDiagNode{std::move(first), std::move(second)});
}

inline ExprPtr mk_double(ExprPtr child) {
    return std::make_shared<const ConvexMatrixExpr>(DoubleNode{std::move(child)});
}

namespace detail {
inline void check_point(const ConvexMatrixExpr& f, const std::vector<double>& x, const char* what) {
    if (static_cast<int>(x.size()) != f.input_dim())
        throw DimensionMismatch(std::string(what) + ": point has dim " + std::to_string(x.size()) +
                                ", function expects " + std::to_string(f.input_dim()));
    check_finite_vec(x, what);
}
}  // namespace detail

/// F(x).
inline SymMat evaluate(const ConvexMatrixExpr& f, const std::vector<double>& x) {
    detail::check_point(f, x, "evaluate");
    return std::visit(
        [&](const auto& n) -> SymMat {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ConstNode>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, AffineNode>) {
                SymMat out = n.coeffs.combine(x);
                out += n.offset;
                return out;
            } else if constexpr (std::is_same_v<T, LiftNode>) {
                SymMat out = n.shape;
                out *= atom_eval(n.atom, x);
                return out;
            } else if constexpr (std::is_same_v<T, SumNode>) {
                return evaluate(*n.lhs, x) + evaluate(*n.rhs, x);
            } else if constexpr (std::is_same_v<T, ScaleNode>) {
                SymMat out = evaluate(*n.child, x);
                out *= n.alpha;
                return out;
            } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                return congruence_transform(n.m, evaluate(*n.child, x));
            } else if constexpr (std::is_same_v<T, HadamardNode>) {
                return hadamard(n.mask, evaluate(*n.child, x));
            } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                std::vector<double> inner = n.a.apply(x);
                for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += n.b[i];
                return evaluate(*n.child, inner);
            } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                return block_diag(evaluate(*n.first, x), evaluate(*n.second, x));
            } else {
                static_assert(std::is_same_v<T, DoubleNode>);
                return double_block(evaluate(*n.child, x));
            }
        },
        f.node());
}

inline SymMat evaluate(const ExprPtr& f, const std::vector<double>& x) {
    detail::check_child(f, "evaluate");
    return evaluate(*f, x);
}

namespace detail {
/// <z, F(x) z> computed structurally: the quadratic form is pushed through
/// the tree instead of materializing F(x), and partial sums are accumulated
/// in extended precision. Keeps scalarization bit-stable against the
/// closed-form identities the tests compare with.
inline long double scalarize_eval_ld(const ConvexMatrixExpr& f, const std::vector<double>& z,
                                     const std::vector<double>& x) {
    return std::visit(
        [&](const auto& n) -> long double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ConstNode>) {
                return n.value.quadratic_form(z);
            } else if constexpr (std::is_same_v<T, AffineNode>) {
                long double acc = n.offset.quadratic_form(z);
                for (int i = 0; i < n.coeffs.count(); ++i)
                    acc += static_cast<long double>(x[static_cast<std::size_t>(i)]) * n.coeffs[i].quadratic_form(z);
                return acc;
            } else if constexpr (std::is_same_v<T, LiftNode>) {
                return static_cast<long double>(atom_eval(n.atom, x)) * n.shape.quadratic_form(z);
            } else if constexpr (std::is_same_v<T, SumNode>) {
                return scalarize_eval_ld(*n.lhs, z, x) + scalarize_eval_ld(*n.rhs, z, x);
            } else if constexpr (std::is_same_v<T, ScaleNode>) {
                return static_cast<long double>(n.alpha) * scalarize_eval_ld(*n.child, z, x);
            } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                return scalarize_eval_ld(*n.child, n.m.apply_transpose(z), x);
            } else if constexpr (std::is_same_v<T, HadamardNode>) {
                const SymMat a = evaluate(*n.child, x);
                long double acc = 0.0L;
                for (int i = 0; i < a.dim(); ++i) {
                    acc += static_cast<long double>(n.mask.at(i, i)) * a.at(i, i) *
                           z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
                    for (int j = i + 1; j < a.dim(); ++j)
                        acc += 2.0L * static_cast<long double>(n.mask.at(i, j)) * a.at(i, j) *
                               z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)];
                }
                return acc;
            } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                std::vector<double> inner = n.a.apply(x);
                for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += n.b[i];
                return scalarize_eval_ld(*n.child, z, inner);
            } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                const int l1 = n.first->output_dim();
                std::vector<double> z1(z.begin(), z.begin() + l1);
                std::vector<double> z2(z.begin() + l1, z.end());
                return scalarize_eval_ld(*n.first, z1, x) + scalarize_eval_ld(*n.second, z2, x);
            } else {
                static_assert(std::is_same_v<T, DoubleNode>);
                const int l = n.child->output_dim();
                std::vector<double> dz(static_cast<std::size_t>(l));
                for (int i = 0; i < l; ++i)
                    dz[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(l + i)];
                return scalarize_eval_ld(*n.child, dz, x);
            }
        },
        f.node());
}
}  // namespace detail

/// F_z(x) = <z, F(x) z>. Convex in x for every fixed z by construction.
inline double scalarize_eval(const ConvexMatrixExpr& f, const std::vector<double>& z,
                             const std::vector<double>& x) {
    detail::check_point(f, x, "scalarize_eval");
    if (static_cast<int>(z.size()) != f.output_dim())
        throw DimensionMismatch("scalarize_eval: z has dim " + std::to_string(z.size()) +
                                ", function output dim is " + std::to_string(f.output_dim()));
    detail::check_finite_vec(z, "scalarize_eval z");
    return static_cast<double>(detail::scalarize_eval_ld(f, z, x));
}

inline double scalarize_eval(const ExprPtr& f, const std::vector<double>& z, const std::vector<double>& x) {
    detail::check_child(f, "scalarize_eval");
    return scalarize_eval(*f, z, x);
}

/// One-sided directional derivative F'(x; h) = lim_{t -> 0+} (F(x+th) - F(x))/t,
/// computed exactly by structural recursion (no finite differences). Nodes
/// are positively homogeneous in h by inspection of each case.
inline SymMat dir_deriv(const ConvexMatrixExpr& f, const std::vector<double>& x,
                        const std::vector<double>& h) {
    detail::check_point(f, x, "dir_deriv");
    if (h.size() != x.size()) throw DimensionMismatch("dir_deriv: direction dim mismatch");
    detail::check_finite_vec(h, "dir_deriv direction");
    bool all_zero = true;
    for (double v : h)
        if (v != 0.0) all_zero = false;
    if (all_zero) throw ZeroDirection("dir_deriv: direction must be nonzero");

    struct Rec {
        static SymMat run(const ConvexMatrixExpr& f, const std::vector<double>& x, const std::vector<double>& h) {
            return std::visit(
                [&](const auto& n) -> SymMat {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, ConstNode>) {
                        return SymMat(n.value.dim());
                    } else if constexpr (std::is_same_v<T, AffineNode>) {
                        return n.coeffs.combine(h);
                    } else if constexpr (std::is_same_v<T, LiftNode>) {
                        SymMat out = n.shape;
                        out *= atom_dir_deriv(n.atom, x, h);
                        return out;
                    } else if constexpr (std::is_same_v<T, SumNode>) {
                        return run(*n.lhs, x, h) + run(*n.rhs, x, h);
                    } else if constexpr (std::is_same_v<T, ScaleNode>) {
                        SymMat out = run(*n.child, x, h);
                        out *= n.alpha;
                        return out;
                    } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                        return congruence_transform(n.m, run(*n.child, x, h));
                    } else if constexpr (std::is_same_v<T, HadamardNode>) {
                        return hadamard(n.mask, run(*n.child, x, h));
                    } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                        std::vector<double> inner = n.a.apply(x);
                        for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += n.b[i];
                        std::vector<double> ah = n.a.apply(h);
                        bool zero = true;
                        for (double v : ah)
                            if (v != 0.0) zero = false;
                        // A h = 0 collapses the inner path to a point; the
                        // difference quotient is identically zero.
                        if (zero) return SymMat(n.child->output_dim());
                        return run(*n.child, inner, ah);
                    } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                        return block_diag(run(*n.first, x, h), run(*n.second, x, h));
                    } else {
                        static_assert(std::is_same_v<T, DoubleNode>);
                        return double_block(run(*n.child, x, h));
                    }
                },
                f.node());
        }
    };
    return Rec::run(f, x, h);
}

inline SymMat dir_deriv(const ExprPtr& f, const std::vector<double>& x, const std::vector<double>& h) {
    detail::check_child(f, "dir_deriv");
    return dir_deriv(*f, x, h);
}

/// Pair of one-sided derivatives of a univariate F; left <= right in the
/// semidefinite order at every point, and the subdifferential at x is
/// exactly {V : left <= V <= right}.
struct Interval1D {
    SymMat left;
    SymMat right;
};

inline Interval1D one_sided_1d(const ConvexMatrixExpr& f, double x) {
    if (f.input_dim() != 1)
        throw NotUnivariate("one_sided_1d: function has input dim " + std::to_string(f.input_dim()));
    SymMat minus = dir_deriv(f, {x}, {-1.0});
    minus *= -1.0;
    return Interval1D{std::move(minus), dir_deriv(f, {x}, {1.0})};
}

inline Interval1D one_sided_1d(const ExprPtr& f, double x) {
    detail::check_child(f, "one_sided_1d");
    return one_sided_1d(*f, x);
}

}  // namespace matconv
