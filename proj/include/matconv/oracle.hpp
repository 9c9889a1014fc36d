#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matconv/expr.hpp"
#include "matconv/rng.hpp"
#include "matconv/subgrad.hpp"

namespace matconv {

enum class Outcome { VerifiedExact, NotFalsified, Falsified };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::VerifiedExact: return "VerifiedExact";
        case Outcome::NotFalsified: return "NotFalsified";
        default: return "Falsified";
    }
}

/// A concrete violation of the subgradient inequality: at the point y
/// (reached from x along `direction` at step `t` when found by a line scan),
/// the unit scalarizer z exposes <z, (F(y) - F(x) - sum (y-x)_i V^(i)) z>
/// = margin below the PSD tolerance in force.
struct Witness {
    std::vector<double> y;
    std::optional<std::vector<double>> direction;
    std::optional<double> t;
    std::vector<double> z;
    double margin = 0.0;
};

/// Result of a membership or convexity check. VerifiedExact is only emitted
/// for univariate functions, where the interval characterization decides
/// membership outright; NotFalsified reports how many samples failed to
/// refute and is deliberately not a proof. The seed is echoed for replay.
struct Verdict {
    Outcome outcome = Outcome::NotFalsified;
    long samples = 0;
    std::optional<Witness> witness;
    std::uint64_t seed = 0;
};

namespace detail {

inline const double kRadialGrid[] = {1e-3, 1e-1, 1.0, 10.0};

/// F(y) - F(x) - sum_i (y - x)_i V^(i); PSD for all y iff V is a subgradient
/// at x.
inline SymMat subgrad_gap(const ConvexMatrixExpr& f, const std::vector<double>& x, const SymMat& fx,
                          const MatTuple& v, const std::vector<double>& y) {
    std::vector<double> delta(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) delta[i] = y[i] - x[i];
    SymMat d = evaluate(f, y);
    d -= fx;
    d -= v.combine(delta);
    return d;
}

/// Scans y = x + t h over a signed log grid (with refinement around the most
/// violating step) for a point where the gap matrix fails the PSD test.
inline std::optional<Witness> scan_line_for_witness(const ConvexMatrixExpr& f, const std::vector<double>& x,
                                                    const SymMat& fx, const MatTuple& v,
                                                    const std::vector<double>& h, bool scan_pos,
                                                    bool scan_neg, double tol) {
    std::vector<double> steps;
    for (double t : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        if (scan_pos) steps.push_back(t);
        if (scan_neg) steps.push_back(-t);
    }

    auto probe = [&](double t, double& margin_out, double& tol_out, std::vector<double>& z_out,
                     std::vector<double>& y_out) {
        std::vector<double> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * h[i];
        PsdVerdict pv = psd_verdict(subgrad_gap(f, x, fx, v, y), tol);
        margin_out = pv.min_eigenvalue;
        tol_out = pv.tolerance_used;
        z_out = std::move(pv.witness);
        y_out = std::move(y);
    };

    double best_t = 0.0, best_margin = 0.0, best_tol = 0.0;
    std::vector<double> best_z, best_y;
    bool found = false;
    auto consider = [&](double t) {
        double margin, tu;
        std::vector<double> z, y;
        probe(t, margin, tu, z, y);
        if (margin < -tu && (!found || margin < best_margin)) {
            found = true;
            best_t = t;
            best_margin = margin;
            best_tol = tu;
            best_z = std::move(z);
            best_y = std::move(y);
        }
    };
    for (double t : steps) consider(t);
    if (found) {
        const double t0 = best_t;
        for (double fac : {0.25, 0.5, 0.75, 1.5, 2.0, 3.0}) consider(t0 * fac);
    }
    (void)best_tol;
    if (!found) return std::nullopt;
    Witness w;
    w.y = std::move(best_y);
    w.direction = h;
    w.t = best_t;
    w.z = std::move(best_z);
    w.margin = best_margin;
    return w;
}

/// Deterministic direction prefix: +e_i, -e_i, then normalized all-ones.
/// Counterexamples concentrate on coordinate kinks, so these come before any
/// random draw.
inline std::vector<std::vector<double>> direction_prefix(int d) {
    std::vector<std::vector<double>> dirs;
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < d; ++i) {
            std::vector<double> e(static_cast<std::size_t>(d), 0.0);
            e[static_cast<std::size_t>(i)] = s == 0 ? 1.0 : -1.0;
            dirs.push_back(std::move(e));
        }
    std::vector<double> ones(static_cast<std::size_t>(d), 1.0 / std::sqrt(static_cast<double>(d)));
    dirs.push_back(std::move(ones));
    return dirs;
}

inline void check_candidate_dims(const ConvexMatrixExpr& f, const MatTuple& v) {
    if (v.count() != f.input_dim())
        throw DimensionMismatch("candidate has " + std::to_string(v.count()) +
                                " matrices, function input dim is " + std::to_string(f.input_dim()));
    if (v.dim() != f.output_dim())
        throw DimensionMismatch("candidate matrices have dim " + std::to_string(v.dim()) +
                                ", function output dim is " + std::to_string(f.output_dim()));
}

}  // namespace detail

/// Membership test for V in the subdifferential of F at x.
///
/// Univariate F: decided exactly by the interval characterization — two
/// semidefinite-order tests against the one-sided derivatives — yielding
/// VerifiedExact or Falsified.
///
/// d >= 2: for `budget` directions h (coordinate axes and the all-ones
/// direction first, then uniform on the sphere), the restriction to the line
/// x + t h is tested exactly at t = 0 via its one-sided derivatives against
/// W_h = sum_i h_i V^(i), and the raw inequality is additionally probed on a
/// radial grid. Any violation falsifies with a concrete witness; surviving
/// all samples yields NotFalsified, which is not a proof.
inline Verdict check_subgradient(const ConvexMatrixExpr& f, const std::vector<double>& x,
                                 const MatTuple& v, long budget, std::uint64_t seed,
                                 double tol = kDefaultPsdTol) {
    detail::check_point(f, x, "check_subgradient");
    detail::check_candidate_dims(f, v);
    if (budget < 1) throw BudgetZero("check_subgradient: budget must be at least 1");

    Verdict verdict;
    verdict.seed = seed;
    const SymMat fx = evaluate(f, x);
    const int d = f.input_dim();

    if (d == 1) {
        const Interval1D iv = subdiff_interval_1d(f, x[0]);
        const PsdVerdict lo = loewner_leq(iv.left, v[0], tol);
        const PsdVerdict hi = loewner_leq(v[0], iv.right, tol);
        verdict.samples = 2;
        if (lo.psd && hi.psd) {
            verdict.outcome = Outcome::VerifiedExact;
            return verdict;
        }
        verdict.outcome = Outcome::Falsified;
        std::optional<Witness> w =
            detail::scan_line_for_witness(f, x, fx, v, {1.0}, !hi.psd, !lo.psd, tol);
        if (!w) {
            // The interval test is authoritative; fall back to a
            // derivative-level witness at a tiny step when the grid cannot
            // realize the violation beyond tolerance.
            Witness fallback;
            const double t = !hi.psd ? 1e-6 : -1e-6;
            fallback.y = {x[0] + t};
            fallback.direction = std::vector<double>{1.0};
            fallback.t = t;
            fallback.z = !hi.psd ? hi.witness : lo.witness;
            SymMat gap = detail::subgrad_gap(f, x, fx, v, fallback.y);
            fallback.margin = static_cast<double>(gap.quadratic_form(fallback.z));
            w = std::move(fallback);
        }
        verdict.witness = std::move(w);
        return verdict;
    }

    Rng rng(seed);
    const std::vector<std::vector<double>> prefix = detail::direction_prefix(d);
    long used = 0;
    while (used < budget) {
        std::vector<double> h = used < static_cast<long>(prefix.size())
                                    ? prefix[static_cast<std::size_t>(used)]
                                    : rng.unit_vector(d);
        ++used;

        // Exact test of the line restriction at t = 0. Membership of V
        // forces W_h into the restriction's derivative interval, so a
        // violation here refutes V outright.
        const SymMat w_h = v.combine(h);
        std::vector<double> neg_h(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) neg_h[i] = -h[i];
        SymMat left = dir_deriv(f, x, neg_h);
        left *= -1.0;
        const SymMat right = dir_deriv(f, x, h);
        const PsdVerdict lo = loewner_leq(left, w_h, tol);
        const PsdVerdict hi = loewner_leq(w_h, right, tol);
        if (!lo.psd || !hi.psd) {
            verdict.outcome = Outcome::Falsified;
            verdict.samples = used;
            std::optional<Witness> w =
                detail::scan_line_for_witness(f, x, fx, v, h, !hi.psd, !lo.psd, tol);
            if (!w) {
                Witness fallback;
                const double t = !hi.psd ? 1e-6 : -1e-6;
                fallback.y = x;
                for (std::size_t i = 0; i < h.size(); ++i) fallback.y[i] += t * h[i];
                fallback.direction = h;
                fallback.t = t;
                fallback.z = !hi.psd ? hi.witness : lo.witness;
                SymMat gap = detail::subgrad_gap(f, x, fx, v, fallback.y);
                fallback.margin = static_cast<double>(gap.quadratic_form(fallback.z));
                w = std::move(fallback);
            }
            verdict.witness = std::move(w);
            return verdict;
        }

        // Raw inequality on the radial grid along the same line.
        for (double r : detail::kRadialGrid) {
            for (double sign : {1.0, -1.0}) {
                const double t = sign * r;
                std::vector<double> y = x;
                for (std::size_t i = 0; i < h.size(); ++i) y[i] += t * h[i];
                PsdVerdict pv = psd_verdict(detail::subgrad_gap(f, x, fx, v, y), tol);
                if (!pv.psd) {
                    verdict.outcome = Outcome::Falsified;
                    verdict.samples = used;
                    Witness w;
                    w.y = std::move(y);
                    w.direction = h;
                    w.t = t;
                    w.z = std::move(pv.witness);
                    w.margin = pv.min_eigenvalue;
                    verdict.witness = std::move(w);
                    return verdict;
                }
            }
        }
    }
    verdict.outcome = Outcome::NotFalsified;
    verdict.samples = used;
    return verdict;
}

inline Verdict check_subgradient(const ExprPtr& f, const std::vector<double>& x, const MatTuple& v,
                                 long budget, std::uint64_t seed, double tol = kDefaultPsdTol) {
    detail::check_child(f, "check_subgradient");
    return check_subgradient(*f, x, v, budget, seed, tol);
}

/// Pure sampling route: probes only the raw inequality at sampled points,
/// never the exact interval characterization. Univariate budgets count
/// probed points (a signed log grid first, then log-uniform random steps);
/// multivariate budgets count directions, each probed on the radial grid.
inline Verdict check_subgradient_sampled(const ConvexMatrixExpr& f, const std::vector<double>& x,
                                         const MatTuple& v, long budget, std::uint64_t seed,
                                         double tol = kDefaultPsdTol) {
    detail::check_point(f, x, "check_subgradient_sampled");
    detail::check_candidate_dims(f, v);
    if (budget < 1) throw BudgetZero("check_subgradient_sampled: budget must be at least 1");

    Verdict verdict;
    verdict.seed = seed;
    const SymMat fx = evaluate(f, x);
    const int d = f.input_dim();
    Rng rng(seed);

    auto probe = [&](const std::vector<double>& y, const std::vector<double>& h,
                     double t) -> bool {
        PsdVerdict pv = psd_verdict(detail::subgrad_gap(f, x, fx, v, y), tol);
        if (pv.psd) return false;
        verdict.outcome = Outcome::Falsified;
        Witness w;
        w.y = y;
        w.direction = h;
        w.t = t;
        w.z = std::move(pv.witness);
        w.margin = pv.min_eigenvalue;
        verdict.witness = std::move(w);
        return true;
    };

    long used = 0;
    if (d == 1) {
        std::vector<double> steps;
        for (double r : detail::kRadialGrid) {
            steps.push_back(r);
            steps.push_back(-r);
        }
        while (used < budget) {
            double t;
            if (used < static_cast<long>(steps.size())) {
                t = steps[static_cast<std::size_t>(used)];
            } else {
                const double mag = std::pow(10.0, rng.uniform(-4.0, 1.0));
                t = rng.uniform() < 0.5 ? mag : -mag;
            }
            ++used;
            verdict.samples = used;
            if (probe({x[0] + t}, {1.0}, t)) return verdict;
        }
    } else {
        const std::vector<std::vector<double>> prefix = detail::direction_prefix(d);
        while (used < budget) {
            std::vector<double> h = used < static_cast<long>(prefix.size())
                                        ? prefix[static_cast<std::size_t>(used)]
                                        : rng.unit_vector(d);
            ++used;
            verdict.samples = used;
            for (double r : detail::kRadialGrid) {
                for (double sign : {1.0, -1.0}) {
                    const double t = sign * r;
                    std::vector<double> y = x;
                    for (std::size_t i = 0; i < h.size(); ++i) y[i] += t * h[i];
                    if (probe(y, h, t)) return verdict;
                }
            }
        }
    }
    verdict.outcome = Outcome::NotFalsified;
    verdict.samples = used;
    return verdict;
}

inline Verdict check_subgradient_sampled(const ExprPtr& f, const std::vector<double>& x,
                                         const MatTuple& v, long budget, std::uint64_t seed,
                                         double tol = kDefaultPsdTol) {
    detail::check_child(f, "check_subgradient_sampled");
    return check_subgradient_sampled(*f, x, v, budget, seed, tol);
}

/// Tests the scalarized subgradient inequality for a fixed z:
/// F_z(y) - F_z(x) >= sum_i <z, V^(i) z> (y - x)_i at sampled y. A
/// falsification here implies the matrix-level check would falsify with the
/// same (y, z).
inline Verdict check_scalarized(const ConvexMatrixExpr& f, const std::vector<double>& x,
                                const MatTuple& v, const std::vector<double>& z, long budget,
                                std::uint64_t seed, double tol = kDefaultPsdTol) {
    detail::check_point(f, x, "check_scalarized");
    detail::check_candidate_dims(f, v);
    if (static_cast<int>(z.size()) != f.output_dim())
        throw DimensionMismatch("check_scalarized: z dim mismatch");
    if (budget < 1) throw BudgetZero("check_scalarized: budget must be at least 1");

    Verdict verdict;
    verdict.seed = seed;

    double z_norm_sq = 0.0;
    for (double zi : z) z_norm_sq += zi * zi;
    if (z_norm_sq == 0.0) {
        verdict.outcome = Outcome::NotFalsified;
        verdict.samples = 0;
        return verdict;
    }
    const double z_norm = std::sqrt(z_norm_sq);
    std::vector<double> zu(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zu[i] = z[i] / z_norm;

    const int d = f.input_dim();
    std::vector<double> vz(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) vz[static_cast<std::size_t>(i)] = static_cast<double>(v[i].quadratic_form(zu));
    const double fzx = scalarize_eval(f, zu, x);

    Rng rng(seed);
    const std::vector<std::vector<double>> prefix = detail::direction_prefix(d);
    long used = 0;
    while (used < budget) {
        std::vector<double> h = used < static_cast<long>(prefix.size())
                                    ? prefix[static_cast<std::size_t>(used)]
                                    : rng.unit_vector(d);
        ++used;
        verdict.samples = used;
        for (double r : detail::kRadialGrid) {
            for (double sign : {1.0, -1.0}) {
                const double t = sign * r;
                std::vector<double> y = x;
                for (std::size_t i = 0; i < h.size(); ++i) y[i] += t * h[i];
                const double fzy = scalarize_eval(f, zu, y);
                long double linear = 0.0L;
                for (int i = 0; i < d; ++i)
                    linear += static_cast<long double>(vz[static_cast<std::size_t>(i)]) *
                              (y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
                const double margin = static_cast<double>(
                    static_cast<long double>(fzy) - static_cast<long double>(fzx) - linear);
                const double tau =
                    tol * (1.0 + std::abs(fzy) + std::abs(fzx) + std::abs(static_cast<double>(linear)));
                if (margin < -tau) {
                    verdict.outcome = Outcome::Falsified;
                    Witness w;
                    w.y = std::move(y);
                    w.direction = h;
                    w.t = t;
                    w.z = zu;
                    w.margin = margin;
                    verdict.witness = std::move(w);
                    return verdict;
                }
            }
        }
    }
    verdict.outcome = Outcome::NotFalsified;
    return verdict;
}

inline Verdict check_scalarized(const ExprPtr& f, const std::vector<double>& x, const MatTuple& v,
                                const std::vector<double>& z, long budget, std::uint64_t seed,
                                double tol = kDefaultPsdTol) {
    detail::check_child(f, "check_scalarized");
    return check_scalarized(*f, x, v, z, budget, seed, tol);
}

/// Evaluable matrix function for convexity falsification of raw,
/// not-necessarily-convex candidates.
using MatrixFn = std::function<SymMat(const std::vector<double>&)>;

struct ConvexityWitness {
    std::vector<double> x1;
    std::vector<double> x2;
    double alpha = 0.5;
    std::vector<double> z;
    double violation = 0.0;
};

/// Searches for a violation of midpoint matrix convexity through scalarized
/// probes <z, F(.) z>: returns the first (x1, x2, alpha, z) with
/// F_z(alpha x1 + (1-alpha) x2) exceeding the mixture by more than the
/// relative tolerance, or nothing. Functions built from the expression
/// constructors can never yield a witness.
inline std::optional<ConvexityWitness> falsify_convexity(const MatrixFn& fn, int input_dim,
                                                         int output_dim, long budget,
                                                         std::uint64_t seed,
                                                         double tol = kDefaultPsdTol) {
    if (input_dim < 1 || input_dim > kMaxInputDim)
        throw DimensionMismatch("falsify_convexity: input dim out of range");
    if (output_dim < 1 || output_dim > kMaxMatrixDim)
        throw DimensionMismatch("falsify_convexity: output dim out of range");
    if (budget < 1) throw BudgetZero("falsify_convexity: budget must be at least 1");

    // Structured probes first: sign-flip pairs along the all-ones segment
    // with coordinate and difference scalarizers catch the common concave
    // off-diagonal patterns before any random draw.
    std::vector<std::vector<double>> z_prefix;
    for (int i = 0; i < output_dim; ++i) {
        std::vector<double> e(static_cast<std::size_t>(output_dim), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        z_prefix.push_back(std::move(e));
    }
    for (int i = 0; i < output_dim; ++i)
        for (int j = i + 1; j < output_dim; ++j) {
            std::vector<double> zp(static_cast<std::size_t>(output_dim), 0.0);
            zp[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(2.0);
            zp[static_cast<std::size_t>(j)] = -1.0 / std::sqrt(2.0);
            z_prefix.push_back(std::move(zp));
            std::vector<double> zm(static_cast<std::size_t>(output_dim), 0.0);
            zm[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(2.0);
            zm[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(2.0);
            z_prefix.push_back(std::move(zm));
        }

    Rng rng(seed);
    long used = 0;
    auto trial = [&](const std::vector<double>& x1, const std::vector<double>& x2, double alpha,
                     const std::vector<double>& z) -> std::optional<ConvexityWitness> {
        std::vector<double> mid(x1.size());
        for (std::size_t i = 0; i < x1.size(); ++i) mid[i] = alpha * x1[i] + (1.0 - alpha) * x2[i];
        const double v1 = static_cast<double>(fn(x1).quadratic_form(z));
        const double v2 = static_cast<double>(fn(x2).quadratic_form(z));
        const double vm = static_cast<double>(fn(mid).quadratic_form(z));
        const double excess = vm - (alpha * v1 + (1.0 - alpha) * v2);
        const double tau = tol * (1.0 + std::abs(v1) + std::abs(v2) + std::abs(vm));
        if (excess > tau)
            return ConvexityWitness{x1, x2, alpha, z, excess};
        return std::nullopt;
    };

    const std::vector<double> ones_neg(static_cast<std::size_t>(input_dim), -1.0);
    const std::vector<double> ones_pos(static_cast<std::size_t>(input_dim), 1.0);
    for (const std::vector<double>& z : z_prefix) {
        if (used >= budget) break;
        ++used;
        if (auto w = trial(ones_neg, ones_pos, 0.5, z)) return w;
    }
    while (used < budget) {
        ++used;
        const std::vector<double> x1 = rng.vector(input_dim, -3.0, 3.0);
        const std::vector<double> x2 = rng.vector(input_dim, -3.0, 3.0);
        const double alpha = rng.uniform();
        const std::vector<double> z = rng.unit_vector(output_dim);
        if (auto w = trial(x1, x2, alpha, z)) return w;
    }
    return std::nullopt;
}

inline std::optional<ConvexityWitness> falsify_convexity(const ConvexMatrixExpr& f, long budget,
                                                         std::uint64_t seed,
                                                         double tol = kDefaultPsdTol) {
    return falsify_convexity([&f](const std::vector<double>& x) { return evaluate(f, x); },
                             f.input_dim(), f.output_dim(), budget, seed, tol);
}

inline std::optional<ConvexityWitness> falsify_convexity(const ExprPtr& f, long budget,
                                                         std::uint64_t seed,
                                                         double tol = kDefaultPsdTol) {
    detail::check_child(f, "falsify_convexity");
    return falsify_convexity(*f, budget, seed, tol);
}

}  // namespace matconv
