#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matconv/expr.hpp"
#include "matconv/rng.hpp"

namespace matconv {

inline constexpr double kDefaultDiffTol = 1e-8;

/// One node of the derivation trace: which calculus rule produced the value
/// at this level, mirroring the expression tree shape. note carries
/// equality-case annotations ("square-invertible", "reciprocal-psd") where
/// the rule is known to be exact rather than an inclusion.
struct ProvenanceNode {
    std::string rule;
    std::vector<ProvenanceNode> children;
    std::string note;
};

/// A subgradient together with the rule derivation that certifies it.
struct SubgradientCert {
    MatTuple value;
    ProvenanceNode provenance;
};

/// Element of the subdifferential at x, built by structural recursion. Each
/// rule maps members of the children's subdifferentials to a member of the
/// parent's, so the result is certified by construction. Leaf policies are
/// deterministic: |x_i| at its kink contributes 0, max-affine picks the
/// lowest-index active piece.
inline SubgradientCert subgradient(const ConvexMatrixExpr& f, const std::vector<double>& x) {
    detail::check_point(f, x, "subgradient");
    return std::visit(
        [&](const auto& n) -> SubgradientCert {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ConstNode>) {
                return {MatTuple::zeros(n.input_dim, n.value.dim()), {"affine-exact", {}, {}}};
            } else if constexpr (std::is_same_v<T, AffineNode>) {
                return {n.coeffs, {"affine-exact", {}, {}}};
            } else if constexpr (std::is_same_v<T, LiftNode>) {
                const std::vector<double> g = atom_subgradient_choice(n.atom, x);
                std::vector<SymMat> vs;
                vs.reserve(g.size());
                for (double gi : g) {
                    SymMat v = n.shape;
                    v *= gi;
                    vs.push_back(std::move(v));
                }
                return {MatTuple(std::move(vs)), {"lift", {}, {}}};
            } else if constexpr (std::is_same_v<T, SumNode>) {
                SubgradientCert a = subgradient(*n.lhs, x);
                SubgradientCert b = subgradient(*n.rhs, x);
                return {a.value + b.value,
                        {"sum-rule", {std::move(a.provenance), std::move(b.provenance)}, {}}};
            } else if constexpr (std::is_same_v<T, ScaleNode>) {
                SubgradientCert c = subgradient(*n.child, x);
                c.value *= n.alpha;
                return {std::move(c.value), {"scale", {std::move(c.provenance)}, {}}};
            } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                SubgradientCert c = subgradient(*n.child, x);
                std::vector<SymMat> vs;
                vs.reserve(static_cast<std::size_t>(c.value.count()));
                for (int i = 0; i < c.value.count(); ++i) vs.push_back(congruence_transform(n.m, c.value[i]));
                return {MatTuple(std::move(vs)),
                        {"congruence",
                         {std::move(c.provenance)},
                         n.square_invertible ? "square-invertible" : ""}};
            } else if constexpr (std::is_same_v<T, HadamardNode>) {
                SubgradientCert c = subgradient(*n.child, x);
                std::vector<SymMat> vs;
                vs.reserve(static_cast<std::size_t>(c.value.count()));
                for (int i = 0; i < c.value.count(); ++i) vs.push_back(hadamard(n.mask, c.value[i]));
                return {MatTuple(std::move(vs)),
                        {"hadamard", {std::move(c.provenance)}, n.reciprocal_psd ? "reciprocal-psd" : ""}};
            } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                std::vector<double> inner = n.a.apply(x);
                for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += n.b[i];
                SubgradientCert c = subgradient(*n.child, inner);
                // W^(j) = sum_i A_ij V^(i): the adjoint of y -> Ay carries
                // child subgradients to subgradients of y -> F(Ay + b).
                std::vector<SymMat> vs;
                vs.reserve(static_cast<std::size_t>(n.a.cols()));
                for (int j = 0; j < n.a.cols(); ++j) {
                    SymMat w(c.value.dim());
                    for (int i = 0; i < n.a.rows(); ++i) {
                        SymMat term = c.value[i];
                        term *= n.a(i, j);
                        w += term;
                    }
                    vs.push_back(std::move(w));
                }
                return {MatTuple(std::move(vs)), {"precompose", {std::move(c.provenance)}, {}}};
            } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                SubgradientCert a = subgradient(*n.first, x);
                SubgradientCert b = subgradient(*n.second, x);
                std::vector<SymMat> vs;
                vs.reserve(static_cast<std::size_t>(a.value.count()));
                for (int i = 0; i < a.value.count(); ++i) vs.push_back(block_diag(a.value[i], b.value[i]));
                return {MatTuple(std::move(vs)),
                        {"block-diag", {std::move(a.provenance), std::move(b.provenance)}, {}}};
            } else {
                static_assert(std::is_same_v<T, DoubleNode>);
                SubgradientCert c = subgradient(*n.child, x);
                std::vector<SymMat> vs;
                vs.reserve(static_cast<std::size_t>(c.value.count()));
                for (int i = 0; i < c.value.count(); ++i) vs.push_back(double_block(c.value[i]));
                return {MatTuple(std::move(vs)), {"double", {std::move(c.provenance)}, {}}};
            }
        },
        f.node());
}

inline SubgradientCert subgradient(const ExprPtr& f, const std::vector<double>& x) {
    detail::check_child(f, "subgradient");
    return subgradient(*f, x);
}

/// Exact univariate subdifferential: {V : left <= V <= right}, both
/// endpoints included.
inline Interval1D subdiff_interval_1d(const ConvexMatrixExpr& f, double x) {
    if (f.input_dim() != 1)
        throw NotUnivariate("subdiff_interval_1d: function has input dim " +
                            std::to_string(f.input_dim()));
    return one_sided_1d(f, x);
}

inline Interval1D subdiff_interval_1d(const ExprPtr& f, double x) {
    detail::check_child(f, "subdiff_interval_1d");
    return subdiff_interval_1d(*f, x);
}

/// The right derivative of a univariate F is itself a subgradient; this
/// packages it with its own provenance tag as an alternative to the forward
/// rule engine.
inline SubgradientCert right_derivative_subgradient(const ConvexMatrixExpr& f, double x) {
    if (f.input_dim() != 1)
        throw NotUnivariate("right_derivative_subgradient: function has input dim " +
                            std::to_string(f.input_dim()));
    return {MatTuple({dir_deriv(f, {x}, {1.0})}), {"right-derivative-1d", {}, {}}};
}

namespace detail {
/// Coordinatewise smoothness probe shared by gradient_if_smooth and
/// clarke_sample. Returns the failing 1-based coordinate, or the gradient.
inline std::pair<std::optional<MatTuple>, int> try_gradient(const ConvexMatrixExpr& f,
                                                            const std::vector<double>& x, double tol) {
    const int d = f.input_dim();
    std::vector<SymMat> grads;
    grads.reserve(static_cast<std::size_t>(d));
    std::vector<double> h(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        h[static_cast<std::size_t>(i)] = 1.0;
        SymMat plus = dir_deriv(f, x, h);
        h[static_cast<std::size_t>(i)] = -1.0;
        SymMat minus = dir_deriv(f, x, h);
        h[static_cast<std::size_t>(i)] = 0.0;
        if (frobenius_norm(minus + plus) > tol) return {std::nullopt, i + 1};
        grads.push_back(std::move(plus));
    }
    return {MatTuple(std::move(grads)), 0};
}
}  // namespace detail

/// The gradient (F'(x) as a tuple of partial derivatives) when all one-sided
/// directional derivatives agree along coordinate axes within tol; at such
/// points the subdifferential is the singleton {F'(x)}.
inline MatTuple gradient_if_smooth(const ConvexMatrixExpr& f, const std::vector<double>& x,
                                   double tol = kDefaultDiffTol) {
    detail::check_point(f, x, "gradient_if_smooth");
    auto [grad, bad_coord] = detail::try_gradient(f, x, tol);
    if (!grad)
        throw NotDifferentiable("gradient_if_smooth: one-sided derivatives disagree at coordinate " +
                                    std::to_string(bad_coord),
                                bad_coord);
    return std::move(*grad);
}

inline MatTuple gradient_if_smooth(const ExprPtr& f, const std::vector<double>& x,
                                   double tol = kDefaultDiffTol) {
    detail::check_child(f, "gradient_if_smooth");
    return gradient_if_smooth(*f, x, tol);
}

/// Gradients at n points drawn uniformly from the ball B(x, radius), keeping
/// only smooth draws. The returned tuples approximate generators of the
/// Clarke generalized Jacobian at x, each of which is also a subgradient (up
/// to radius-induced error). Deterministic for a fixed seed.
inline std::vector<MatTuple> clarke_sample(const ConvexMatrixExpr& f, const std::vector<double>& x,
                                           int n, double radius, std::uint64_t seed,
                                           double tol = kDefaultDiffTol) {
    detail::check_point(f, x, "clarke_sample");
    if (n < 1) throw BudgetZero("clarke_sample: sample count must be at least 1");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw PreconditionViolated("clarke_sample: radius must be positive and finite");

    const int d = f.input_dim();
    Rng rng(seed);
    std::vector<MatTuple> out;
    for (int k = 0; k < n; ++k) {
        const std::vector<double> u = rng.unit_vector(d);
        const double r = radius * std::pow(rng.uniform(), 1.0 / d);
        std::vector<double> y = x;
        for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] += r * u[static_cast<std::size_t>(i)];
        auto [grad, bad_coord] = detail::try_gradient(f, y, tol);
        (void)bad_coord;
        if (grad) out.push_back(std::move(*grad));
    }
    if (out.empty()) throw NoSmoothSamples("clarke_sample: all " + std::to_string(n) + " draws were nonsmooth");
    return out;
}

inline std::vector<MatTuple> clarke_sample(const ExprPtr& f, const std::vector<double>& x, int n,
                                           double radius, std::uint64_t seed, double tol = kDefaultDiffTol) {
    detail::check_child(f, "clarke_sample");
    return clarke_sample(*f, x, n, radius, seed, tol);
}

}  // namespace matconv
