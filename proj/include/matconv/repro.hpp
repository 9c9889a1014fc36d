#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "matconv/oracle.hpp"

namespace matconv {

/// A machine-checkable assertion about a named example.
struct Fact {
    std::string description;
    std::function<bool()> check;
};

/// Prebuilt expression with its registered facts. Every fact is expected to
/// pass; a failing fact is a defect in the library, not in the example.
struct ExampleCase {
    std::string name;
    ExprPtr expression;
    std::vector<Fact> facts;
};

inline std::vector<std::string> example_names() {
    return {"abs-sum-2x2", "diag-max-2x", "sum-strict", "double-abs"};
}

namespace detail {

inline bool close_entrywise(const SymMat& a, const SymMat& b, double tol) {
    if (a.dim() != b.dim()) return false;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i; j < a.dim(); ++j)
            if (std::abs(a.at(i, j) - b.at(i, j)) > tol) return false;
    return true;
}

/// max{0, 2x} on the real line.
inline ScalarAtom max_zero_2x() {
    return MaxAffineAtom({{{0.0}, 0.0}, {{2.0}, 0.0}});
}

inline SymMat one_1x1() {
    SymMat m(1);
    m.set(0, 0, 1.0);
    return m;
}

inline SymMat ones_pattern_2x2(double off_sign) {
    return SymMat::from_rows({{1.0, off_sign}, {off_sign, 1.0}});
}

}  // namespace detail

/// Builds one of the registered examples by name:
///   abs-sum-2x2 — |x1| ones(2) + |x2| sign-flip(2), with its closed-form
///                 scalarization and the nonconvex off-diagonal entry;
///   diag-max-2x — diag(max{0,2x}, max{0,2x}), the non-diagonal subgradient
///                 V0 and the strict gap between sampled gradients and the
///                 full subdifferential;
///   sum-strict  — the diag-max-2x function split into two block summands
///                 whose subdifferentials at 0 are forced diagonal, so the
///                 sum of subdifferentials misses V0;
///   double-abs  — the doubling of |x| with its scalarization collapse.
inline ExampleCase build_example(const std::string& name) {
    const double kTol = 1e-12;

    if (name == "abs-sum-2x2") {
        ExprPtr f = mk_sum(mk_lift(AbsCoordAtom(0, 2), detail::ones_pattern_2x2(1.0)),
                           mk_lift(AbsCoordAtom(1, 2), detail::ones_pattern_2x2(-1.0)));
        ExampleCase ex{name, f, {}};
        ex.facts.push_back(
            {"F(1,-2) equals [[3,-1],[-1,3]]", [f, kTol] {
                 return detail::close_entrywise(evaluate(f, {1.0, -2.0}),
                                                SymMat::from_rows({{3.0, -1.0}, {-1.0, 3.0}}), kTol);
             }});
        ex.facts.push_back(
            {"scalarization matches |x1|(z1+z2)^2 + |x2|(z1-z2)^2 at 100 seeded points (1e-12)",
             [f, kTol] {
                 Rng rng(101);
                 for (int k = 0; k < 100; ++k) {
                     const std::vector<double> x = rng.vector(2, -10.0, 10.0);
                     const std::vector<double> z = rng.vector(2, -10.0, 10.0);
                     const long double s = static_cast<long double>(z[0]) + z[1];
                     const long double d = static_cast<long double>(z[0]) - z[1];
                     const long double ref = std::abs(static_cast<long double>(x[0])) * s * s +
                                             std::abs(static_cast<long double>(x[1])) * d * d;
                     if (std::abs(scalarize_eval(f, z, x) - static_cast<double>(ref)) > kTol)
                         return false;
                 }
                 return true;
             }});
        ex.facts.push_back({"midpoint convexity search finds no counterexample (budget 10000)",
                            [f] { return !falsify_convexity(f, 10000, 7).has_value(); }});
        ex.facts.push_back(
            {"the off-diagonal entry |x1|-|x2| is nonconvex as a scalar function", [f] {
                 MatrixFn off_diag = [f](const std::vector<double>& x) {
                     SymMat m(1);
                     m.set(0, 0, evaluate(f, x).at(0, 1));
                     return m;
                 };
                 return falsify_convexity(off_diag, 2, 1, 10000, 7).has_value();
             }});
        return ex;
    }

    if (name == "diag-max-2x") {
        ExprPtr piece = mk_lift(detail::max_zero_2x(), detail::one_1x1());
        ExprPtr f = mk_block_diag(piece, piece);
        const SymMat v0 = detail::ones_pattern_2x2(1.0);
        ExampleCase ex{name, f, {}};
        ex.facts.push_back({"one-sided derivatives at 0 are 0 and 2I", [f, kTol] {
                                const Interval1D iv = subdiff_interval_1d(f, 0.0);
                                return detail::close_entrywise(iv.left, SymMat(2), kTol) &&
                                       detail::close_entrywise(iv.right, 2.0 * SymMat::identity(2), kTol);
                            }});
        ex.facts.push_back({"V0 = [[1,1],[1,1]] is verified as a subgradient at 0", [f, v0] {
                                return check_subgradient(f, {0.0}, MatTuple({v0}), 100, 7).outcome ==
                                       Outcome::VerifiedExact;
                            }});
        ex.facts.push_back(
            {"gap matrices against V0 have eigenvalues 0 and 2 on both sides", [f, v0] {
                 const Interval1D iv = subdiff_interval_1d(f, 0.0);
                 const Spectrum hi = eigen_sym(iv.right - v0);
                 const Spectrum lo = eigen_sym(v0 - iv.left);
                 auto is02 = [](const Spectrum& s) {
                     return std::abs(s.eigenvalues[0] - 0.0) <= 1e-12 &&
                            std::abs(s.eigenvalues[1] - 2.0) <= 1e-12;
                 };
                 return is02(hi) && is02(lo);
             }});
        ex.facts.push_back(
            {"1000 sampled gradients near 0 all land on {0, 2I} (radius 1e-3)", [f] {
                 const std::vector<MatTuple> gens = clarke_sample(f, {0.0}, 1000, 1e-3, 7);
                 const SymMat two_i = 2.0 * SymMat::identity(2);
                 for (const MatTuple& g : gens) {
                     const bool zero = frobenius_norm(g[0]) <= 1e-9;
                     const bool two = frobenius_norm(g[0] - two_i) <= 1e-9;
                     if (!zero && !two) return false;
                 }
                 return true;
             }});
        ex.facts.push_back(
            {"V0 stays at distance >= sqrt(2) from the segment of sampled gradients", [v0] {
                 double min_dist = 1e300;
                 for (int k = 0; k <= 2000; ++k) {
                     const double t = 2.0 * k / 2000.0;
                     min_dist = std::min(min_dist, frobenius_norm(v0 - t * SymMat::identity(2)));
                 }
                 return min_dist >= std::sqrt(2.0) - 1e-9;
             }});
        ex.facts.push_back({"0 is a kink: gradient_if_smooth rejects coordinate 1", [f] {
                                try {
                                    gradient_if_smooth(f, {0.0});
                                    return false;
                                } catch (const NotDifferentiable& e) {
                                    return e.coordinate == 1;
                                }
                            }});
        return ex;
    }

    if (name == "sum-strict") {
        ExprPtr lifted = mk_lift(detail::max_zero_2x(), detail::one_1x1());
        ExprPtr zero1 = mk_const(SymMat(1), 1);
        ExprPtr f1 = mk_block_diag(lifted, zero1);
        ExprPtr f2 = mk_block_diag(zero1, lifted);
        ExprPtr f = mk_sum(f1, f2);
        const SymMat v0 = detail::ones_pattern_2x2(1.0);
        ExampleCase ex{name, f, {}};
        ex.facts.push_back({"interval of the first summand at 0 is (0, diag(2,0))", [f1, kTol] {
                                const Interval1D iv = subdiff_interval_1d(f1, 0.0);
                                return detail::close_entrywise(iv.left, SymMat(2), kTol) &&
                                       detail::close_entrywise(
                                           iv.right, SymMat::from_rows({{2.0, 0.0}, {0.0, 0.0}}), kTol);
                            }});
        ex.facts.push_back(
            {"1000 random candidates with |V12| > 1e-6 are all rejected for the first summand",
             [f1] {
                 Rng rng(13);
                 for (int k = 0; k < 1000; ++k) {
                     SymMat v(2);
                     v.set(0, 0, rng.uniform(-2.0, 2.0));
                     v.set(1, 1, rng.uniform(-2.0, 2.0));
                     double b = 0.0;
                     while (std::abs(b) <= 1e-6) b = rng.uniform(-2.0, 2.0);
                     v.set(0, 1, b);
                     if (check_subgradient(f1, {0.0}, MatTuple({v}), 10, 7).outcome !=
                         Outcome::Falsified)
                         return false;
                 }
                 return true;
             }});
        ex.facts.push_back(
            {"summand intervals pin the diagonals, so both subdifferentials are diagonal",
             [f1, f2, kTol] {
                 const Interval1D i1 = subdiff_interval_1d(f1, 0.0);
                 const Interval1D i2 = subdiff_interval_1d(f2, 0.0);
                 // Entry (2,2) of any member of the first interval sits
                 // between 0 and 0; PSD of the member then forces V12 = 0.
                 // Mirrored for the second summand's entry (1,1).
                 return std::abs(i1.left.at(1, 1)) <= kTol && std::abs(i1.right.at(1, 1)) <= kTol &&
                        std::abs(i2.left.at(0, 0)) <= kTol && std::abs(i2.right.at(0, 0)) <= kTol;
             }});
        ex.facts.push_back(
            {"V0 belongs to the subdifferential of the sum but has nonzero off-diagonal", [f, v0] {
                 const bool member = check_subgradient(f, {0.0}, MatTuple({v0}), 100, 7).outcome ==
                                     Outcome::VerifiedExact;
                 return member && std::abs(v0.at(0, 1)) > 0.5;
             }});
        return ex;
    }

    if (name == "double-abs") {
        ExprPtr child = mk_lift(AbsCoordAtom(0, 1), detail::one_1x1());
        ExprPtr g = mk_double(child);
        ExampleCase ex{name, g, {}};
        ex.facts.push_back({"G(-2) equals [[2,-2],[-2,2]]", [g, kTol] {
                                return detail::close_entrywise(
                                    evaluate(g, {-2.0}),
                                    SymMat::from_rows({{2.0, -2.0}, {-2.0, 2.0}}), kTol);
                            }});
        ex.facts.push_back(
            {"scalarization collapses to |x|(z1-z2)^2 at 100 seeded points (1e-12)", [g, kTol] {
                 Rng rng(19);
                 for (int k = 0; k < 100; ++k) {
                     const std::vector<double> x = rng.vector(1, -10.0, 10.0);
                     const std::vector<double> z = rng.vector(2, -10.0, 10.0);
                     const long double d = static_cast<long double>(z[0]) - z[1];
                     const long double ref = std::abs(static_cast<long double>(x[0])) * d * d;
                     if (std::abs(scalarize_eval(g, z, x) - static_cast<double>(ref)) > kTol)
                         return false;
                 }
                 return true;
             }});
        ex.facts.push_back({"z = (1,1) annihilates G", [g, kTol] {
                                Rng rng(23);
                                for (int k = 0; k < 100; ++k) {
                                    const std::vector<double> x = rng.vector(1, -10.0, 10.0);
                                    if (std::abs(scalarize_eval(g, {1.0, 1.0}, x)) > kTol) return false;
                                }
                                return true;
                            }});
        ex.facts.push_back(
            {"forward subgradient at 0 is the zero tuple and verifies exactly", [g] {
                 const SubgradientCert cert = subgradient(g, {0.0});
                 if (cert.provenance.rule != "double") return false;
                 if (frobenius_norm(cert.value[0]) > 0.0) return false;
                 return check_subgradient(g, {0.0}, cert.value, 10, 7).outcome ==
                        Outcome::VerifiedExact;
             }});
        ex.facts.push_back({"interval at 0 is (-B, B) with B = [[1,-1],[-1,1]]", [g, kTol] {
                                const SymMat b = detail::ones_pattern_2x2(-1.0);
                                const Interval1D iv = subdiff_interval_1d(g, 0.0);
                                return detail::close_entrywise(iv.left, -b, kTol) &&
                                       detail::close_entrywise(iv.right, b, kTol);
                            }});
        return ex;
    }

    throw UnknownExample(name);
}

}  // namespace matconv
