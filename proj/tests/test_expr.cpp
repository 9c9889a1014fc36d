#include "catch_amalgamated.hpp"
#include "helpers.hpp"

using namespace matconv;
using testutil::close_entrywise;
using testutil::random_expr;
using testutil::random_psd;
using testutil::random_sym;
using testutil::sym_1x1;

namespace {

std::vector<double> axpy(const std::vector<double>& x, double t, const std::vector<double>& h) {
    std::vector<double> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * h[i];
    return y;
}

}  // namespace

TEST_CASE("constant and affine evaluation", "[expr]") {
    const SymMat c = SymMat::from_rows({{1.0, 2.0}, {2.0, 5.0}});
    const ExprPtr f = mk_const(c, 3);
    CHECK(f->input_dim() == 3);
    CHECK(f->output_dim() == 2);
    CHECK(close_entrywise(evaluate(f, {9.0, -1.0, 0.5}), c, 0.0));

    // F(x) = A0 + x1 V1 + x2 V2.
    const SymMat v1 = SymMat::from_rows({{1.0, 0.0}, {0.0, -1.0}});
    const SymMat v2 = SymMat::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    const SymMat a0 = SymMat::identity(2);
    const ExprPtr g = mk_affine(MatTuple({v1, v2}), a0);
    CHECK(close_entrywise(evaluate(g, {2.0, 3.0}),
                          SymMat::from_rows({{3.0, 3.0}, {3.0, -1.0}}), 1e-15));
}

namespace {
SymMat ones2() { return SymMat::from_rows({{1.0, 1.0}, {1.0, 1.0}}); }
}  // namespace

TEST_CASE("lift evaluation multiplies the atom value into the shape", "[expr]") {
    const ExprPtr f = mk_lift(AbsCoordAtom(0, 2), ones2());
    CHECK(close_entrywise(evaluate(f, {-3.0, 7.0}), 3.0 * ones2(), 1e-15));
    CHECK(close_entrywise(evaluate(f, {0.0, 7.0}), SymMat(2), 0.0));

    const ExprPtr g = mk_lift(MaxAffineAtom({{{0.0}, 0.0}, {{2.0}, 0.0}}), sym_1x1(1.0));
    CHECK(evaluate(g, {3.0}).at(0, 0) == 6.0);
    CHECK(evaluate(g, {-3.0}).at(0, 0) == 0.0);
}

TEST_CASE("combinator evaluation matches direct formulas", "[expr]") {
    Rng rng(31);
    const ExprPtr base = mk_affine(MatTuple({random_sym(rng, 2), random_sym(rng, 2)}),
                                   random_sym(rng, 2));
    const std::vector<double> x = {0.7, -1.3};
    const SymMat bx = evaluate(base, x);

    CHECK(close_entrywise(evaluate(mk_scale(2.5, base), x), 2.5 * bx, 1e-12));
    CHECK(close_entrywise(evaluate(mk_sum(base, base), x), bx + bx, 1e-12));

    const DenseMat m = testutil::random_dense(rng, 3, 2);
    CHECK(close_entrywise(evaluate(mk_congruence(m, base), x), congruence_transform(m, bx), 1e-12));

    const SymMat mask = random_psd(rng, 2);
    CHECK(close_entrywise(evaluate(mk_hadamard(mask, base), x), hadamard(mask, bx), 1e-12));

    const DenseMat a = testutil::random_dense(rng, 2, 3);
    const std::vector<double> b = {0.1, -0.2};
    const std::vector<double> y = {1.0, 2.0, -0.5};
    std::vector<double> inner = a.apply(y);
    for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += b[i];
    CHECK(close_entrywise(evaluate(mk_precompose(base, a, b), y), evaluate(base, inner), 1e-12));

    CHECK(close_entrywise(evaluate(mk_block_diag(base, base), x), block_diag(bx, bx), 1e-12));
    CHECK(close_entrywise(evaluate(mk_double(base), x), double_block(bx), 1e-12));
}

TEST_CASE("congruence by sqrt(2) I equals scaling by 2", "[expr]") {
    Rng rng(37);
    const ExprPtr base = random_expr(rng, 2, 3, 2);
    DenseMat m = DenseMat::identity(3);
    for (int i = 0; i < 3; ++i) m(i, i) = std::sqrt(2.0);
    const ExprPtr viaCongruence = mk_congruence(m, base);
    const ExprPtr viaScale = mk_scale(2.0, base);
    for (int k = 0; k < 10; ++k) {
        const std::vector<double> x = rng.vector(2, -2.0, 2.0);
        const SymMat a = evaluate(viaCongruence, x);
        const SymMat b = evaluate(viaScale, x);
        CHECK(close_entrywise(a, b, 1e-9 * (1.0 + frobenius_norm(b))));
    }
}

TEST_CASE("construction validation", "[expr]") {
    // Mask [[1,2],[2,1]] has eigenvalues -1 and 3: not PSD.
    const SymMat badMask = SymMat::from_rows({{1.0, 2.0}, {2.0, 1.0}});
    const ExprPtr base = mk_lift(AbsCoordAtom(0, 1), SymMat::identity(2));
    CHECK_THROWS_AS(mk_hadamard(badMask, base), NotPsd);
    CHECK_THROWS_AS(mk_lift(AbsCoordAtom(0, 1), badMask), NotPsd);
    CHECK_THROWS_AS(mk_scale(-1.0, base), NegativeScale);
    CHECK_THROWS_AS(mk_scale(std::nan(""), base), NegativeScale);
    CHECK_NOTHROW(mk_scale(0.0, base));

    const ExprPtr other_dim = mk_const(SymMat::identity(3), 1);
    const ExprPtr other_input = mk_const(SymMat::identity(2), 2);
    CHECK_THROWS_AS(mk_sum(base, other_dim), DimensionMismatch);
    CHECK_THROWS_AS(mk_sum(base, other_input), DimensionMismatch);
    CHECK_THROWS_AS(mk_block_diag(base, other_input), DimensionMismatch);
    CHECK_THROWS_AS(mk_congruence(DenseMat::identity(3), base), DimensionMismatch);
    CHECK_THROWS_AS(mk_hadamard(SymMat::identity(3), base), DimensionMismatch);
    CHECK_THROWS_AS(mk_precompose(base, DenseMat::identity(2), {0.0}), DimensionMismatch);
    CHECK_THROWS_AS(mk_const(SymMat::identity(2), 17), DimensionMismatch);
    CHECK_THROWS_AS(mk_const(SymMat::identity(2), 0), DimensionMismatch);
    CHECK_THROWS_AS(mk_sum(nullptr, base), PreconditionViolated);
}

TEST_CASE("evaluation input validation", "[expr]") {
    const ExprPtr f = mk_lift(AbsCoordAtom(0, 2), SymMat::identity(2));
    CHECK_THROWS_AS(evaluate(f, {1.0}), DimensionMismatch);
    CHECK_THROWS_AS(evaluate(f, {1.0, std::nan("")}), NonFinite);
    CHECK_THROWS_AS(dir_deriv(f, {1.0, 1.0}, {0.0, 0.0}), ZeroDirection);
    CHECK_THROWS_AS(dir_deriv(f, {1.0, 1.0}, {1.0}), DimensionMismatch);
    CHECK_THROWS_AS(scalarize_eval(f, {1.0}, {1.0, 1.0}), DimensionMismatch);
    CHECK_THROWS_AS(one_sided_1d(f, 0.0), NotUnivariate);
}

TEST_CASE("scalarization agrees with the quadratic form of the evaluation", "[expr]") {
    Rng rng(41);
    for (int k = 0; k < 60; ++k) {
        const int d = 1 + rng.uniform_int(3);
        const int ell = 1 + rng.uniform_int(4);
        const ExprPtr f = random_expr(rng, d, ell, 3);
        const std::vector<double> x = rng.vector(d, -2.0, 2.0);
        const std::vector<double> z = rng.vector(f->output_dim(), -1.5, 1.5);
        const SymMat fx = evaluate(f, x);
        const double direct = static_cast<double>(fx.quadratic_form(z));
        const double structural = scalarize_eval(f, z, x);
        CHECK(std::abs(direct - structural) <= 1e-10 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("doubling scalarizes through the difference vector", "[expr]") {
    Rng rng(43);
    for (int k = 0; k < 40; ++k) {
        const int d = 1 + rng.uniform_int(2);
        const int ell = 1 + rng.uniform_int(3);
        const ExprPtr f = random_expr(rng, d, ell, 2);
        const ExprPtr g = mk_double(f);
        const std::vector<double> x = rng.vector(d, -2.0, 2.0);
        const std::vector<double> z1 = rng.vector(ell, -1.0, 1.0);
        const std::vector<double> z2 = rng.vector(ell, -1.0, 1.0);
        std::vector<double> z = z1;
        z.insert(z.end(), z2.begin(), z2.end());
        std::vector<double> diff(static_cast<std::size_t>(ell));
        for (int i = 0; i < ell; ++i)
            diff[static_cast<std::size_t>(i)] = z1[static_cast<std::size_t>(i)] - z2[static_cast<std::size_t>(i)];
        const double lhs = scalarize_eval(g, z, x);
        const double rhs = scalarize_eval(f, diff, x);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("every reachable expression is midpoint convex", "[expr]") {
    Rng rng(47);
    for (int k = 0; k < 200; ++k) {
        const int d = 1 + rng.uniform_int(3);
        const int ell = 1 + rng.uniform_int(4);
        const ExprPtr f = random_expr(rng, d, ell, 3);
        for (int rep = 0; rep < 3; ++rep) {
            const std::vector<double> x1 = rng.vector(d, -2.0, 2.0);
            const std::vector<double> x2 = rng.vector(d, -2.0, 2.0);
            std::vector<double> mid(x1.size());
            for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (x1[i] + x2[i]);
            const SymMat lhs = evaluate(f, mid);
            const SymMat rhs = 0.5 * (evaluate(f, x1) + evaluate(f, x2));
            const double tol = 1e-9 * (1.0 + frobenius_norm(rhs));
            CHECK(loewner_leq(lhs, rhs, tol).psd);
        }
    }
}

TEST_CASE("secant slopes are monotone along every line", "[expr]") {
    Rng rng(53);
    for (int k = 0; k < 60; ++k) {
        const int d = 1 + rng.uniform_int(3);
        const int ell = 1 + rng.uniform_int(3);
        const ExprPtr f = random_expr(rng, d, ell, 3);
        const std::vector<double> x = rng.vector(d, -1.0, 1.0);
        const std::vector<double> h = rng.unit_vector(d);
        const SymMat fx = evaluate(f, x);
        SymMat prev(ell);
        bool have_prev = false;
        for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            SymMat slope = evaluate(f, axpy(x, t, h)) - fx;
            slope *= 1.0 / t;
            if (have_prev) {
                const double tol = 1e-8 * (1.0 + frobenius_norm(slope));
                CHECK(loewner_leq(prev, slope, tol).psd);
            }
            prev = slope;
            have_prev = true;
        }
    }
}

TEST_CASE("directional derivative matches difference quotients off kinks", "[expr]") {
    Rng rng(59);
    int checked = 0;
    for (int k = 0; k < 120 && checked < 60; ++k) {
        const int d = 1 + rng.uniform_int(3);
        const int ell = 1 + rng.uniform_int(3);
        const ExprPtr f = random_expr(rng, d, ell, 3);
        const std::vector<double> x = rng.vector(d, -2.0, 2.0);
        const double margin = testutil::min_kink_margin(*f, x);
        if (margin < 1e-5) continue;
        const std::vector<double> h = rng.unit_vector(d);
        const double t = std::min(1e-4, 0.25 * margin);
        // Reachable functions are piecewise linear, so inside the kink margin
        // the difference quotient is the derivative up to rounding.
        const SymMat fd = (1.0 / t) * (evaluate(f, axpy(x, t, h)) - evaluate(f, x));
        const SymMat dd = dir_deriv(f, x, h);
        const double scale = 1.0 + frobenius_norm(dd) + frobenius_norm(evaluate(f, x));
        CHECK(frobenius_norm(fd - dd) <= 1e-6 * scale);
        ++checked;
    }
    CHECK(checked >= 40);
}

TEST_CASE("directional derivative is positively homogeneous in the direction", "[expr]") {
    Rng rng(61);
    for (int k = 0; k < 40; ++k) {
        const int d = 1 + rng.uniform_int(3);
        const ExprPtr f = random_expr(rng, d, 1 + rng.uniform_int(3), 2);
        const std::vector<double> x = rng.vector(d, -1.0, 1.0);
        const std::vector<double> h = rng.unit_vector(d);
        const SymMat one = dir_deriv(f, x, h);
        std::vector<double> h3(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) h3[i] = 3.0 * h[i];
        const SymMat three = dir_deriv(f, x, h3);
        CHECK(close_entrywise(three, 3.0 * one, 1e-9 * (1.0 + frobenius_norm(one))));
    }
}

TEST_CASE("precompose annihilates directions in the kernel", "[expr]") {
    // A = [1, 1] sends h = (1, -1) to zero, so the derivative vanishes even
    // though the inner function has a kink at the mapped point.
    const ExprPtr inner = mk_lift(AbsCoordAtom(0, 1), SymMat::identity(2));
    DenseMat a(1, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 1.0;
    const ExprPtr f = mk_precompose(inner, a, {0.0});
    const SymMat dd = dir_deriv(f, {0.5, -0.5}, {1.0, -1.0});
    CHECK(frobenius_norm(dd) == 0.0);
}

TEST_CASE("one-sided derivatives straddle zero at a kink", "[expr]") {
    const ExprPtr f = mk_lift(AbsCoordAtom(0, 1), ones2());
    const Interval1D iv = one_sided_1d(f, 0.0);
    CHECK(close_entrywise(iv.left, -1.0 * ones2(), 0.0));
    CHECK(close_entrywise(iv.right, ones2(), 0.0));

    const Interval1D smooth = one_sided_1d(f, 2.0);
    CHECK(close_entrywise(smooth.left, smooth.right, 0.0));
    CHECK(close_entrywise(smooth.right, ones2(), 0.0));
}

TEST_CASE("scaling by zero flattens kinks", "[expr]") {
    const ExprPtr f = mk_scale(0.0, mk_lift(AbsCoordAtom(0, 1), ones2()));
    const Interval1D iv = one_sided_1d(f, 0.0);
    CHECK(frobenius_norm(iv.left) == 0.0);
    CHECK(frobenius_norm(iv.right) == 0.0);
    CHECK_NOTHROW(gradient_if_smooth(f, {0.0}));
}

TEST_CASE("left endpoint never exceeds right endpoint", "[expr]") {
    Rng rng(67);
    for (int k = 0; k < 60; ++k) {
        const ExprPtr f = random_expr(rng, 1, 1 + rng.uniform_int(3), 3);
        const double x = rng.uniform(-2.0, 2.0);
        const Interval1D iv = one_sided_1d(f, x);
        CHECK(loewner_leq(iv.left, iv.right, 1e-9 * (1.0 + frobenius_norm(iv.right))).psd);
    }
}
