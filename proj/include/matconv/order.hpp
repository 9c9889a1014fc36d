#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "matconv/eigen.hpp"
#include "matconv/errors.hpp"
#include "matconv/symmat.hpp"

namespace matconv {

inline constexpr double kDefaultPsdTol = 1e-9;

/// Outcome of a positive-semidefiniteness decision at a relative tolerance.
/// tolerance_used is the effective absolute threshold tol * (1 + ||A||_F);
/// min_eigenvalue >= -tolerance_used classifies as PSD, so exact boundary
/// cases (min eigenvalue 0) land on the PSD side. On Indefinite, witness is
/// a unit vector z with <z, A z> = min_eigenvalue < -tolerance_used.
struct PsdVerdict {
    bool psd = false;
    double min_eigenvalue = 0.0;
    double tolerance_used = 0.0;
    std::vector<double> witness;  // empty when psd
};

inline PsdVerdict psd_verdict(const SymMat& a, double tol = kDefaultPsdTol) {
    if (!a.is_finite()) throw NonFinite("psd_verdict: matrix entries must be finite");
    if (!(tol >= 0.0)) throw PreconditionViolated("psd_verdict: tol must be nonnegative");
    Spectrum sp = eigen_sym(a);
    PsdVerdict v;
    v.min_eigenvalue = sp.eigenvalues.front();
    v.tolerance_used = tol * (1.0 + frobenius_norm(a));
    v.psd = v.min_eigenvalue >= -v.tolerance_used;
    if (!v.psd) {
        v.witness.resize(static_cast<std::size_t>(a.dim()));
        for (int i = 0; i < a.dim(); ++i) v.witness[static_cast<std::size_t>(i)] = sp.basis(i, 0);
    }
    return v;
}

/// A <= B in the semidefinite order, i.e. B - A is PSD.
inline PsdVerdict loewner_leq(const SymMat& a, const SymMat& b, double tol = kDefaultPsdTol) {
    if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dims differ");
    return psd_verdict(b - a, tol);
}

/// Throwing variant for callers that treat non-PSD as a hard error.
inline void require_psd(const SymMat& a, const std::string& what, double tol = kDefaultPsdTol) {
    PsdVerdict v = psd_verdict(a, tol);
    if (!v.psd) throw NotPsd(what, v.witness, v.min_eigenvalue);
}

/// Boundedness harness for order intervals: with ||X1|| <= C, ||X2|| <= C,
/// Y PSD, Z NSD, and X1 + Y = X2 + Z, the common point X = X1 + Y satisfies
/// ||X||_F <= 3C. Premises are validated first and a PreconditionViolated
/// listing every failed premise is thrown before the bound is evaluated.
/// Returns true iff ||X1 + Y||_F <= 3C + 1e-9, which on valid inputs is
/// always the case.
inline bool order_ball_bound_check(double c, const SymMat& x1, const SymMat& x2, const SymMat& y,
                                   const SymMat& z, double tol = kDefaultPsdTol) {
    if (x1.dim() != x2.dim() || x1.dim() != y.dim() || x1.dim() != z.dim())
        throw DimensionMismatch("order_ball_bound_check: dims must agree");

    std::string failures;
    auto fail = [&](const char* msg) {
        if (!failures.empty()) failures += "; ";
        failures += msg;
    };
    if (!(c > 0.0) || !std::isfinite(c)) fail("radius C must be positive and finite");
    if (std::isfinite(c) && c > 0.0) {
        if (frobenius_norm(x1) > c * (1.0 + 1e-9)) fail("||X1|| exceeds C");
        if (frobenius_norm(x2) > c * (1.0 + 1e-9)) fail("||X2|| exceeds C");
    }
    if (!psd_verdict(y, tol).psd) fail("Y is not PSD");
    if (!psd_verdict(-z, tol).psd) fail("Z is not NSD");
    if (frobenius_norm((x1 + y) - (x2 + z)) > 1e-9 * (1.0 + std::abs(c))) fail("X1 + Y != X2 + Z");
    if (!failures.empty()) throw PreconditionViolated("order_ball_bound_check: " + failures);

    return frobenius_norm(x1 + y) <= 3.0 * c + 1e-9;
}

}  // namespace matconv
