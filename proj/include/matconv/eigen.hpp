#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "matconv/errors.hpp"
#include "matconv/symmat.hpp"

namespace matconv {

/// Full eigendecomposition: eigenvalues ascending, basis column k is the
/// unit eigenvector for eigenvalues[k].
struct Spectrum {
    std::vector<double> eigenvalues;
    DenseMat basis;
};

/// Cyclic Jacobi for symmetric matrices. Deterministic sweep order (upper
/// triangle row-major), so identical inputs give identical output across
/// runs. Adequate for the dim <= 32 regime this library enforces.
inline Spectrum eigen_sym(const SymMat& a) {
    const int n = a.dim();
    std::vector<std::vector<double>> m = a.to_rows();
    DenseMat v = DenseMat::identity(n);

    auto off_norm = [&] {
        long double acc = 0.0L;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                acc += 2.0L * static_cast<long double>(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
                       m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return std::sqrt(static_cast<double>(acc));
    };

    const double scale = std::max(frobenius_norm(a), 1e-300);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > 1e-15 * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                if (apq == 0.0) continue;
                const double app = m[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)];
                const double aqq = m[static_cast<std::size_t>(q)][static_cast<std::size_t>(q)];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double mkp = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
                    const double mkq = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)];
                    m[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] = c * mkp - s * mkq;
                    m[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)] = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
                    const double mqk = m[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)];
                    m[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)] = c * mpk - s * mqk;
                    m[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)] = s * mpk + c * mqk;
                }
                m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = 0.0;
                m[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<double> evals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) evals[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return evals[static_cast<std::size_t>(x)] < evals[static_cast<std::size_t>(y)]; });

    Spectrum out{std::vector<double>(static_cast<std::size_t>(n)), DenseMat(n, n)};
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        out.eigenvalues[static_cast<std::size_t>(k)] = evals[static_cast<std::size_t>(src)];
        for (int i = 0; i < n; ++i) out.basis(i, k) = v(i, src);
    }
    return out;
}

inline double min_eigenvalue(const SymMat& a) { return eigen_sym(a).eigenvalues.front(); }

}  // namespace matconv
