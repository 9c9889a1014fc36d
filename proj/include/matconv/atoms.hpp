#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "matconv/errors.hpp"

namespace matconv {

inline constexpr double kMaxAffineActiveTol = 1e-12;  // absolute gap for active pieces

namespace detail {
inline void check_finite_vec(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw NonFinite(std::string(what) + " must be finite");
}

inline long double dot_ld(const std::vector<double>& a, const std::vector<double>& b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<long double>(a[i]) * b[i];
    return acc;
}
}  // namespace detail

/// f(x) = <a, x> + b. Affine, hence convex; smooth everywhere.
struct AffineScalarAtom {
    std::vector<double> coeffs;
    double offset = 0.0;

    AffineScalarAtom(std::vector<double> a, double b) : coeffs(std::move(a)), offset(b) {
        if (coeffs.empty()) throw DimensionMismatch("affine scalar atom needs at least one coefficient");
        detail::check_finite_vec(coeffs, "affine scalar coefficients");
        if (!std::isfinite(offset)) throw NonFinite("affine scalar offset must be finite");
    }
};

/// f(x) = |x_index|. Kink exactly on the hyperplane x_index = 0; the kink
/// test is exact comparison with zero, not a tolerance band.
struct AbsCoordAtom {
    int index = 0;
    int dim = 1;

    AbsCoordAtom(int index_, int dim_) : index(index_), dim(dim_) {
        if (dim < 1) throw DimensionMismatch("abs coord atom: dim must be positive");
        if (index < 0 || index >= dim)
            throw DimensionMismatch("abs coord atom: index " + std::to_string(index) +
                                    " out of range for dim " + std::to_string(dim));
    }
};

/// f(x) = max_k (<a_k, x> + b_k). Pieces keep their given order; tie-breaking
/// policies below refer to that order.
struct MaxAffineAtom {
    struct Piece {
        std::vector<double> coeffs;
        double offset = 0.0;
    };
    std::vector<Piece> pieces;

    explicit MaxAffineAtom(std::vector<Piece> pieces_) : pieces(std::move(pieces_)) {
        if (pieces.empty()) throw DimensionMismatch("max-affine atom needs at least one piece");
        const std::size_t d = pieces.front().coeffs.size();
        if (d == 0) throw DimensionMismatch("max-affine atom pieces need at least one coefficient");
        for (const Piece& p : pieces) {
            if (p.coeffs.size() != d) throw DimensionMismatch("max-affine atom pieces have unequal dims");
            detail::check_finite_vec(p.coeffs, "max-affine coefficients");
            if (!std::isfinite(p.offset)) throw NonFinite("max-affine offset must be finite");
        }
    }
};

using ScalarAtom = std::variant<AffineScalarAtom, AbsCoordAtom, MaxAffineAtom>;

inline int atom_dim(const ScalarAtom& atom) {
    return std::visit(
        [](const auto& a) -> int {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineScalarAtom>)
                return static_cast<int>(a.coeffs.size());
            else if constexpr (std::is_same_v<T, AbsCoordAtom>)
                return a.dim;
            else
                return static_cast<int>(a.pieces.front().coeffs.size());
        },
        atom);
}

inline double atom_eval(const ScalarAtom& atom, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != atom_dim(atom))
        throw DimensionMismatch("atom eval: point dim mismatch");
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineScalarAtom>) {
                return static_cast<double>(detail::dot_ld(a.coeffs, x) + static_cast<long double>(a.offset));
            } else if constexpr (std::is_same_v<T, AbsCoordAtom>) {
                return std::abs(x[static_cast<std::size_t>(a.index)]);
            } else {
                long double best = detail::dot_ld(a.pieces.front().coeffs, x) + static_cast<long double>(a.pieces.front().offset);
                for (std::size_t k = 1; k < a.pieces.size(); ++k) {
                    const long double v = detail::dot_ld(a.pieces[k].coeffs, x) + static_cast<long double>(a.pieces[k].offset);
                    if (v > best) best = v;
                }
                return static_cast<double>(best);
            }
        },
        atom);
}

/// Indices k with f(x) - (<a_k, x> + b_k) within the absolute active gap.
inline std::vector<int> max_affine_active_set(const MaxAffineAtom& a, const std::vector<double>& x) {
    long double best = detail::dot_ld(a.pieces.front().coeffs, x) + static_cast<long double>(a.pieces.front().offset);
    std::vector<long double> vals(a.pieces.size());
    vals[0] = best;
    for (std::size_t k = 1; k < a.pieces.size(); ++k) {
        vals[k] = detail::dot_ld(a.pieces[k].coeffs, x) + static_cast<long double>(a.pieces[k].offset);
        if (vals[k] > best) best = vals[k];
    }
    std::vector<int> active;
    for (std::size_t k = 0; k < vals.size(); ++k)
        if (static_cast<double>(best - vals[k]) <= kMaxAffineActiveTol) active.push_back(static_cast<int>(k));
    return active;
}

/// Exact one-sided directional derivative f'(x; h). Piecewise-linear atoms
/// admit a closed form: sign cases for |x_i|, max over the active set for
/// max-affine.
inline double atom_dir_deriv(const ScalarAtom& atom, const std::vector<double>& x,
                             const std::vector<double>& h) {
    if (x.size() != h.size()) throw DimensionMismatch("atom dir deriv: point and direction dims differ");
    if (static_cast<int>(x.size()) != atom_dim(atom))
        throw DimensionMismatch("atom dir deriv: point dim mismatch");
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineScalarAtom>) {
                return static_cast<double>(detail::dot_ld(a.coeffs, h));
            } else if constexpr (std::is_same_v<T, AbsCoordAtom>) {
                const double xi = x[static_cast<std::size_t>(a.index)];
                const double hi = h[static_cast<std::size_t>(a.index)];
                if (xi > 0.0) return hi;
                if (xi < 0.0) return -hi;
                return std::abs(hi);
            } else {
                const std::vector<int> active = max_affine_active_set(a, x);
                long double best = detail::dot_ld(a.pieces[static_cast<std::size_t>(active.front())].coeffs, h);
                for (std::size_t j = 1; j < active.size(); ++j) {
                    const long double v = detail::dot_ld(a.pieces[static_cast<std::size_t>(active[j])].coeffs, h);
                    if (v > best) best = v;
                }
                return static_cast<double>(best);
            }
        },
        atom);
}

/// Deterministic element of the convex subdifferential of the atom at x.
/// Policies: |x_i| at the kink yields the zero vector; max-affine yields the
/// gradient of the lowest-index active piece.
inline std::vector<double> atom_subgradient_choice(const ScalarAtom& atom, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != atom_dim(atom))
        throw DimensionMismatch("atom subgradient: point dim mismatch");
    return std::visit(
        [&](const auto& a) -> std::vector<double> {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineScalarAtom>) {
                return a.coeffs;
            } else if constexpr (std::is_same_v<T, AbsCoordAtom>) {
                std::vector<double> g(x.size(), 0.0);
                const double xi = x[static_cast<std::size_t>(a.index)];
                if (xi > 0.0) g[static_cast<std::size_t>(a.index)] = 1.0;
                else if (xi < 0.0) g[static_cast<std::size_t>(a.index)] = -1.0;
                return g;
            } else {
                const std::vector<int> active = max_affine_active_set(a, x);
                return a.pieces[static_cast<std::size_t>(active.front())].coeffs;
            }
        },
        atom);
}

}  // namespace matconv
