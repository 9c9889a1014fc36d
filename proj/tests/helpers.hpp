#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "matconv/matconv.hpp"

// Shared generators for property tests. Everything is driven by the
// deterministic matconv::Rng, so each test pins its own seed.
namespace testutil {

using namespace matconv;

inline SymMat random_sym(Rng& rng, int n, double scale = 2.0) {
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, rng.uniform(-scale, scale));
    return m;
}

/// G G^T scaled, hence PSD.
inline SymMat random_psd(Rng& rng, int n, double scale = 1.0) {
    DenseMat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += g(i, k) * g(j, k);
            m.set(i, j, scale * acc);
        }
    return m;
}

inline DenseMat random_dense(Rng& rng, int rows, int cols, double scale = 1.5) {
    DenseMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
    return m;
}

inline ScalarAtom random_atom(Rng& rng, int d) {
    switch (rng.uniform_int(3)) {
        case 0:
            return AffineScalarAtom(rng.vector(d, -2.0, 2.0), rng.uniform(-2.0, 2.0));
        case 1:
            return AbsCoordAtom(rng.uniform_int(d), d);
        default: {
            std::vector<MaxAffineAtom::Piece> pieces;
            const int count = 2 + rng.uniform_int(2);
            for (int k = 0; k < count; ++k)
                pieces.push_back({rng.vector(d, -2.0, 2.0), rng.uniform(-1.0, 1.0)});
            return MaxAffineAtom(std::move(pieces));
        }
    }
}

/// Random expression with the requested dims. Depth 0 forces a leaf; deeper
/// levels mix all constructors whose dim constraints can hit the target.
inline ExprPtr random_expr(Rng& rng, int d, int ell, int depth) {
    const bool leaf = depth <= 0 || rng.uniform() < 0.25;
    if (leaf) {
        switch (rng.uniform_int(3)) {
            case 0:
                return mk_const(random_sym(rng, ell), d);
            case 1: {
                std::vector<SymMat> coeffs;
                for (int i = 0; i < d; ++i) coeffs.push_back(random_sym(rng, ell, 1.5));
                return mk_affine(MatTuple(std::move(coeffs)), random_sym(rng, ell, 1.5));
            }
            default:
                return mk_lift(random_atom(rng, d), random_psd(rng, ell));
        }
    }
    std::vector<int> kinds = {0, 1, 2, 3, 4};  // sum, scale, congruence, hadamard, precompose
    if (ell >= 2) kinds.push_back(5);          // blockdiag
    if (ell % 2 == 0) kinds.push_back(6);      // double
    switch (kinds[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(kinds.size())))]) {
        case 0:
            return mk_sum(random_expr(rng, d, ell, depth - 1), random_expr(rng, d, ell, depth - 1));
        case 1:
            return mk_scale(rng.uniform(0.0, 2.0), random_expr(rng, d, ell, depth - 1));
        case 2: {
            const int inner = 1 + rng.uniform_int(4);
            return mk_congruence(random_dense(rng, ell, inner, 1.2),
                                 random_expr(rng, d, inner, depth - 1));
        }
        case 3:
            return mk_hadamard(random_psd(rng, ell), random_expr(rng, d, ell, depth - 1));
        case 4: {
            const int inner = 1 + rng.uniform_int(3);
            return mk_precompose(random_expr(rng, inner, ell, depth - 1),
                                 random_dense(rng, inner, d, 1.2), rng.vector(inner, -1.0, 1.0));
        }
        case 5: {
            const int ell1 = 1 + rng.uniform_int(ell - 1);
            return mk_block_diag(random_expr(rng, d, ell1, depth - 1),
                                 random_expr(rng, d, ell - ell1, depth - 1));
        }
        default:
            return mk_double(random_expr(rng, d, ell / 2, depth - 1));
    }
}

inline double atom_kink_margin(const ScalarAtom& atom, const std::vector<double>& x) {
    const double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineScalarAtom>) {
                return inf;
            } else if constexpr (std::is_same_v<T, AbsCoordAtom>) {
                return std::abs(x[static_cast<std::size_t>(a.index)]);
            } else {
                // Distance to the nearest crossing hyperplane of any pair of
                // pieces; parallel pieces never cross.
                double margin = inf;
                const std::size_t m = a.pieces.size();
                for (std::size_t j = 0; j + 1 < m; ++j)
                    for (std::size_t k = j + 1; k < m; ++k) {
                        double gap = a.pieces[j].offset - a.pieces[k].offset;
                        double norm2 = 0.0;
                        for (std::size_t i = 0; i < x.size(); ++i) {
                            const double diff = a.pieces[j].coeffs[i] - a.pieces[k].coeffs[i];
                            gap += diff * x[i];
                            norm2 += diff * diff;
                        }
                        if (norm2 > 0.0) margin = std::min(margin, std::abs(gap) / std::sqrt(norm2));
                    }
                return margin;
            }
        },
        atom);
}

inline double dense_norm(const DenseMat& a) {
    double acc = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
}

/// Conservative lower bound on the distance from x to the nearest kink of
/// the expression. Affine precomposition contracts distances by at most the
/// operator norm of A, bounded here by the Frobenius norm.
inline double min_kink_margin(const ConvexMatrixExpr& f, const std::vector<double>& x) {
    const double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ConstNode> || std::is_same_v<T, AffineNode>) {
                return inf;
            } else if constexpr (std::is_same_v<T, LiftNode>) {
                return atom_kink_margin(n.atom, x);
            } else if constexpr (std::is_same_v<T, SumNode>) {
                return std::min(min_kink_margin(*n.lhs, x), min_kink_margin(*n.rhs, x));
            } else if constexpr (std::is_same_v<T, ScaleNode>) {
                return min_kink_margin(*n.child, x);
            } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                return min_kink_margin(*n.child, x);
            } else if constexpr (std::is_same_v<T, HadamardNode>) {
                return min_kink_margin(*n.child, x);
            } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                std::vector<double> inner = n.a.apply(x);
                for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += n.b[i];
                const double child = min_kink_margin(*n.child, inner);
                const double norm = dense_norm(n.a);
                if (norm == 0.0) return inf;
                return child / norm;
            } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                return std::min(min_kink_margin(*n.first, x), min_kink_margin(*n.second, x));
            } else {
                static_assert(std::is_same_v<T, DoubleNode>);
                return min_kink_margin(*n.child, x);
            }
        },
        f.node());
}

inline bool close_entrywise(const SymMat& a, const SymMat& b, double tol) {
    if (a.dim() != b.dim()) return false;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i; j < a.dim(); ++j)
            if (std::abs(a.at(i, j) - b.at(i, j)) > tol) return false;
    return true;
}

/// max{0, 2x} as a one-piece-vs-two-piece max-affine atom.
inline ScalarAtom max_zero_2x() { return MaxAffineAtom({{{0.0}, 0.0}, {{2.0}, 0.0}}); }

inline SymMat sym_1x1(double v) {
    SymMat m(1);
    m.set(0, 0, v);
    return m;
}

/// diag(max{0,2x}, max{0,2x}).
inline ExprPtr diag_max_2x_expr() {
    ExprPtr piece = mk_lift(max_zero_2x(), sym_1x1(1.0));
    return mk_block_diag(piece, piece);
}

/// Rejection-samples a valid order-interval tuple (X1, X2, Y, Z) with
/// ||X1||, ||X2|| <= c, Y PSD, Z NSD, X1 + Y = X2 + Z.
struct BallTuple {
    SymMat x1, x2, y, z;
};

inline BallTuple sample_ball_tuple(Rng& rng, int dim, double c) {
    for (;;) {
        SymMat x1 = random_sym(rng, dim, 1.0);
        const double n1 = frobenius_norm(x1);
        if (n1 > 0.0) x1 *= rng.uniform() * c / n1;
        SymMat y = random_psd(rng, dim, 1.0);
        const double ny = frobenius_norm(y);
        if (ny > 0.0) y *= rng.uniform() * c / ny;
        SymMat z = random_psd(rng, dim, 1.0);
        const double nz = frobenius_norm(z);
        if (nz > 0.0) z *= -rng.uniform() * c / nz;
        SymMat x2 = x1 + y - z;
        if (frobenius_norm(x2) <= c) return BallTuple{std::move(x1), std::move(x2), std::move(y), std::move(z)};
    }
}

}  // namespace testutil
