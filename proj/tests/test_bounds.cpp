#include "helpers.hpp"

#include "kronchaos/bounds.hpp"
#include "kronchaos/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace kronchaos;

namespace {

double chaos(const Matrix& A, const std::vector<Vector>& x)
{
    const Vector X = testutil::kron(x);
    return X.dot(A * X);
}

std::vector<Vector> random_factors(std::mt19937_64& gen, const std::vector<std::size_t>& sizes)
{
    std::vector<Vector> x;
    for (auto n : sizes) {
        x.push_back(testutil::gaussian_vector(gen, static_cast<long>(n)));
    }
    return x;
}

double spectral(const Matrix& M)
{
    return Eigen::JacobiSVD<Matrix>(M).singularValues()[0];
}

}  // namespace

TEST(ExpectedChaos, IsTheTrace)
{
    EXPECT_EQ(expected_chaos(rearrange_matrix(Matrix::Identity(6, 6), Dims({2, 3}))), 6.0);
    EXPECT_EQ(expected_chaos(rearrange_matrix(Matrix::Zero(4, 4), Dims({2, 2}))), 0.0);
    std::mt19937_64 gen(1);
    const Matrix A = testutil::gaussian_matrix(gen, 4, 4);
    EXPECT_NEAR(expected_chaos(rearrange_matrix(A, Dims({2, 2}))), A.trace(), 1e-14);
}

TEST(ReducedArray, Examples)
{
    std::mt19937_64 gen(2);
    const Matrix A = testutil::gaussian_matrix(gen, 6, 6);
    const auto A2d = rearrange_matrix(A, Dims({2, 3}));
    const auto same = build_reduced_array(A2d, {});
    EXPECT_EQ(same.labels(), A2d.labels());
    EXPECT_EQ(std::vector<double>(same.data().begin(), same.data().end()),
              std::vector<double>(A2d.data().begin(), A2d.data().end()));

    const auto scalar = build_reduced_array(rearrange_matrix(Matrix::Identity(2, 2), Dims({2})), {1});
    EXPECT_EQ(scalar.order(), 0u);
    EXPECT_EQ(scalar[0], 2.0);

    // I = {2}: entry (i1, i1') is sum_k A[(i1, k), (i1', k)].
    const auto R = build_reduced_array(A2d, {2});
    EXPECT_EQ(R.labels(), (AxisSet{1, 3}));
    for (long i = 0; i < 2; ++i) {
        for (long ip = 0; ip < 2; ++ip) {
            double s = 0.0;
            for (long k = 0; k < 3; ++k) {
                s += A(i * 3 + k, ip * 3 + k);
            }
            EXPECT_NEAR(R[static_cast<std::size_t>(i * 2 + ip)], s, 1e-14);
        }
    }
    EXPECT_NEAR(build_reduced_array(A2d, {1, 2})[0], A.trace(), 1e-13);
}

TEST(ReducedArrayDiag, Examples)
{
    std::mt19937_64 gen(3);
    const Matrix A = testutil::gaussian_matrix(gen, 4, 4);
    const auto A2d = rearrange_matrix(A, Dims({2, 2}));
    const auto plain = build_reduced_array(A2d, {1});
    const auto diag0 = build_reduced_array_diag(A2d, {1}, {});
    EXPECT_EQ(std::vector<double>(plain.data().begin(), plain.data().end()),
              std::vector<double>(diag0.data().begin(), diag0.data().end()));

    const Matrix M = testutil::gaussian_matrix(gen, 3, 3);
    const auto d1 = build_reduced_array_diag(rearrange_matrix(M, Dims({3})), {1}, {1});
    for (long i = 0; i < 3; ++i) {
        for (long ip = 0; ip < 3; ++ip) {
            EXPECT_EQ(d1[static_cast<std::size_t>(i * 3 + ip)], i == ip ? M(i, i) : 0.0);
        }
    }

    const auto d2 = build_reduced_array_diag(A2d, {1, 2}, {1});
    EXPECT_EQ(d2.labels(), (AxisSet{1, 3}));
    for (long i = 0; i < 2; ++i) {
        for (long ip = 0; ip < 2; ++ip) {
            const double expect = i == ip ? A(i * 2 + 0, i * 2 + 0) + A(i * 2 + 1, i * 2 + 1) : 0.0;
            EXPECT_NEAR(d2[static_cast<std::size_t>(i * 2 + ip)], expect, 1e-14);
        }
    }
    EXPECT_THROW(build_reduced_array_diag(A2d, {1}, {2}), AxisError);
}

TEST(Symmetrize, OrderOneIsHalfSum)
{
    std::mt19937_64 gen(4);
    const Matrix A = testutil::gaussian_matrix(gen, 5, 5);
    const Matrix S = to_matrix(symmetrize(rearrange_matrix(A, Dims({5}))));
    EXPECT_LT((S - 0.5 * (A + A.transpose())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Symmetrize, FixedPointOnSymmetricInput)
{
    const Matrix S = Matrix::Identity(4, 4) + Matrix::Ones(4, 4);
    const auto A2d = rearrange_matrix(S, Dims({2, 2}));
    ASSERT_TRUE(check_symmetry(A2d));
    EXPECT_EQ(to_matrix(symmetrize(A2d)), S);
}

TEST(Symmetrize, SymmetricAndChaosPreserving)
{
    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t d = 1 + rep % 3;
        std::vector<std::size_t> sizes(d);
        for (auto& n : sizes) {
            n = 1 + gen() % 3;
        }
        const Dims dims(sizes);
        const auto N = static_cast<long>(dims.total());
        const Matrix A = testutil::gaussian_matrix(gen, N, N);
        const auto S2d = symmetrize(rearrange_matrix(A, dims));
        ASSERT_TRUE(check_symmetry(S2d));
        const Matrix S = to_matrix(S2d);
        const auto x = random_factors(gen, sizes);
        const double a = chaos(A, x);
        const double s = chaos(S, x);
        const double scale = A.norm() * testutil::kron(x).squaredNorm();
        EXPECT_LE(std::abs(a - s), 1e-11 * std::max({std::abs(a), std::abs(s), scale}));
    }
}

TEST(CheckSymmetry, Examples)
{
    EXPECT_TRUE(check_symmetry(rearrange_matrix(Matrix::Identity(8, 8), Dims({2, 2, 2}))));
    Matrix M = Matrix::Zero(2, 2);
    M(0, 1) = 1.0;
    EXPECT_FALSE(check_symmetry(rearrange_matrix(M, Dims({2}))));
    // Symmetric as a matrix is not enough for d = 2: the condition is per axis.
    Matrix P = Matrix::Zero(4, 4);
    P(0, 3) = P(3, 0) = 1.0;  // (1,1)+(2,2)
    EXPECT_FALSE(check_symmetry(rearrange_matrix(P, Dims({2, 2}))));
}

TEST(MpDecoupled, Examples)
{
    std::mt19937_64 gen(6);
    const Vector a = testutil::gaussian_vector(gen, 5);
    const TensorArray av({5}, std::vector<double>(a.data(), a.data() + 5));
    for (double p : {1.0, 2.0, 7.5}) {
        EXPECT_NEAR(mp_decoupled(av, p), std::sqrt(p) * a.norm(), 1e-12);
    }
    const Matrix B = testutil::gaussian_matrix(gen, 3, 4);
    std::vector<double> buf(12);
    for (long r = 0; r < 3; ++r) {
        for (long c = 0; c < 4; ++c) {
            buf[static_cast<std::size_t>(r * 4 + c)] = B(r, c);
        }
    }
    const TensorArray Bt({3, 4}, buf);
    for (double p : {1.0, 3.0}) {
        EXPECT_NEAR(mp_decoupled(Bt, p), std::sqrt(p) * B.norm() + p * spectral(B), 1e-10);
    }
    EXPECT_EQ(mp_decoupled(TensorArray::zeros({1, 2}, {2, 2}), 4.0), 0.0);
    EXPECT_THROW(mp_decoupled(Bt, 0.5), ArgumentError);
}

TEST(MpMain, IdentityOrderOne)
{
    for (std::size_t n : {1u, 3u, 6u}) {
        const auto A2d = rearrange_matrix(Matrix::Identity(static_cast<long>(n), static_cast<long>(n)), Dims({n}));
        for (double p : {2.0, 4.0, 9.0}) {
            for (double L : {1.0, 1.3}) {
                const double expect = L * L * (std::sqrt(p) * std::sqrt(static_cast<double>(n)) + p);
                EXPECT_NEAR(mp_main(A2d, p, L), expect, 1e-12 * expect);
            }
        }
    }
}

TEST(MpMain, IdentityOrderTwoByHand)
{
    // Id_4 on dims (2, 2): partition norms of delta(1,3) delta(2,4) and of
    // the two reduced arrays 2 Id_2, evaluated by hand.
    const double r2 = std::sqrt(2.0);
    const auto A2d = rearrange_matrix(Matrix::Identity(4, 4), Dims({2, 2}));
    const auto table = reduced_norm_table(A2d);
    const auto sums = kappa_sums(table);
    ASSERT_EQ(sums.size(), 4u);
    EXPECT_NEAR(sums[0], 2.0 + 4.0 * r2, 1e-12);
    EXPECT_NEAR(sums[1], 8.0 + 4.0 * r2, 1e-12);
    EXPECT_NEAR(sums[2], 4.0 + 2.0 * r2, 1e-7);
    EXPECT_NEAR(sums[3], 1.0, 1e-7);
    for (double p : {2.0, 4.0, 8.0}) {
        const double expect =
            std::sqrt(p) * (2 + 4 * r2) + p * (8 + 4 * r2) + std::pow(p, 1.5) * (4 + 2 * r2) + p * p;
        EXPECT_NEAR(mp_main(A2d, p, 1.0), expect, 1e-7 * expect);
        EXPECT_NEAR(mp_main(A2d, p, 1.2), std::pow(1.2, 4) * expect, 1e-7 * expect);
    }
}

TEST(MpMain, ZeroAndArgumentChecks)
{
    const auto Z = rearrange_matrix(Matrix::Zero(4, 4), Dims({2, 2}));
    EXPECT_EQ(mp_main(Z, 4.0, 1.0), 0.0);
    EXPECT_THROW(mp_main(Z, 1.5, 1.0), ArgumentError);
    EXPECT_THROW(mp_main(Z, 2.0, 0.9), ArgumentError);
}

TEST(MpMain, TableIsReSummable)
{
    std::mt19937_64 gen(7);
    const auto A2d = rearrange_matrix(testutil::gaussian_matrix(gen, 4, 4), Dims({2, 2}));
    const auto table = reduced_norm_table(A2d);
    // Every (I, partition) pair appears once: I in {}, {1}, {2} with Bell(4),
    // Bell(2), Bell(2) partitions.
    EXPECT_EQ(table.terms.size(), 15u + 2u + 2u);
    for (double p : {2.0, 5.0}) {
        double m = 0.0;
        for (const auto& t : table.terms) {
            m += std::pow(p, t.kappa() / 2.0) * t.norm.value;
        }
        EXPECT_NEAR(mp_main_from(table, p, 1.0), m, 1e-12 * m);
        EXPECT_EQ(mp_main_from(table, p, 1.0), mp_main(A2d, p, 1.0));
    }
}

TEST(MpMain, MonotoneAndHomogeneous)
{
    std::mt19937_64 gen(8);
    const Matrix A = testutil::gaussian_matrix(gen, 4, 4);
    const auto A2d = rearrange_matrix(A, Dims({2, 2}));
    const auto scaled = rearrange_matrix(-3.0 * A, Dims({2, 2}));
    double prev_main = 0.0;
    double prev_norm = 0.0;
    double prev_dec = 0.0;
    for (double p : {2.0, 4.0, 8.0, 16.0}) {
        const double m = mp_main(A2d, p, 1.0);
        EXPECT_GE(m, prev_main);
        prev_main = m;
        EXPECT_NEAR(mp_main(scaled, p, 1.0), 3.0 * m, 1e-6 * m);
        const double mn = mp_norm(A, Dims({2, 2}), p, 1.0);
        EXPECT_GE(mn, prev_norm);
        prev_norm = mn;
        const double md = mp_decoupled(A2d, p);
        EXPECT_GE(md, prev_dec);
        prev_dec = md;
    }
}

TEST(MpNorm, IdentityRegression)
{
    // d = 1, A = Id_4, p = 4, L = 1: min{2 * 2 / 2, sqrt(2) sqrt(2)} + min{4 / 2, 2 * 1} = 4.
    EXPECT_NEAR(mp_norm(Matrix::Identity(4, 4), Dims({4}), 4.0, 1.0), 4.0, 1e-12);
    EXPECT_THROW(mp_norm(Matrix::Zero(2, 4), Dims({2, 2}), 4.0, 1.0), DegenerateInputError);
}

TEST(MpNorm, SingleEntryNormsAtMostOne)
{
    Matrix A = Matrix::Zero(2, 4);
    A(1, 2) = 1.0;
    const auto table = reduced_norm_table(gram_array(A, Dims({2, 2})));
    for (const auto& t : table.terms) {
        EXPECT_LE(t.norm.value, 1.0 + 1e-12) << t.partition.to_string();
    }
}

TEST(MpNorm, KappaSumsByLoops)
{
    std::mt19937_64 gen(9);
    const Matrix A = testutil::gaussian_matrix(gen, 2, 4);
    const Matrix B = A.transpose() * A;
    const auto table = reduced_norm_table(gram_array(A, Dims({2, 2})));
    const auto sums = kappa_sums(table);
    // kappa = 1: Frobenius norms of B, of the two partial traces, by loops.
    double tr1 = 0.0;
    double tr2 = 0.0;
    for (long i = 0; i < 2; ++i) {
        for (long ip = 0; ip < 2; ++ip) {
            double s1 = 0.0;
            double s2 = 0.0;
            for (long k = 0; k < 2; ++k) {
                s1 += B(k * 2 + i, k * 2 + ip);  // sum over axis 1
                s2 += B(i * 2 + k, ip * 2 + k);  // sum over axis 2
            }
            tr1 += s1 * s1;
            tr2 += s2 * s2;
        }
    }
    EXPECT_NEAR(sums[0], B.norm() + std::sqrt(tr1) + std::sqrt(tr2), 1e-8);
    const double fro = A.norm();
    for (double p : {2.0, 6.0}) {
        double m = 0.0;
        for (std::size_t k = 0; k < sums.size(); ++k) {
            const double kappa = static_cast<double>(k + 1);
            m += std::min(std::pow(p, kappa / 2) * sums[k] / fro, std::pow(p, kappa / 4) * std::sqrt(sums[k]));
        }
        EXPECT_NEAR(mp_norm(A, Dims({2, 2}), p, 1.0), m, 1e-8 * m);
    }
}

TEST(TailBound, Examples)
{
    std::mt19937_64 gen(10);
    const Matrix A = testutil::gaussian_matrix(gen, 3, 16);
    EXPECT_EQ(tail_bound_ax(A, 4, 2, 0.0).value, 1.0);

    // Boundary between the first two regimes: both exponents equal C n.
    const double s = spectral(A);
    const double t = 4.0 * s;
    const auto ex = tail_exponents(A, 4, 2, t);
    double x1 = -1.0;
    double x2 = -1.0;
    for (const auto& [r, x] : ex) {
        if (r == 1) {
            x1 = x;
        } else if (r == 2) {
            x2 = x;
        }
    }
    EXPECT_NEAR(x1, 4.0, 1e-12);
    EXPECT_NEAR(x2, 4.0, 1e-12);

    // n = 4, d = 2, A = Id_16, t = 2.
    const auto b = tail_bound_ax(Matrix::Identity(16, 16), 4, 2, 2.0, 1.0);
    ASSERT_EQ(b.evaluated.size(), 2u);
    EXPECT_EQ(b.evaluated[0].first, 1);
    EXPECT_NEAR(b.evaluated[0].second, std::exp(2.0 - 1.0), 1e-12);
    EXPECT_EQ(b.evaluated[1].first, 3);
    EXPECT_NEAR(b.evaluated[1].second, std::exp(2.0 - 4.0 / 32.0), 1e-12);
    EXPECT_EQ(b.regimes, (std::vector<int>{1}));
    EXPECT_EQ(b.value, 1.0);
}

TEST(TailBound, DecaysAndClips)
{
    const Matrix A = Matrix::Identity(16, 16);
    double prev = 1.0;
    for (double t = 0.5; t < 40.0; t *= 1.5) {
        const auto b = tail_bound_ax(A, 4, 2, t, 1.0);
        EXPECT_GE(b.value, 0.0);
        EXPECT_LE(b.value, prev + 1e-15);
        prev = b.value;
    }
    EXPECT_LT(prev, 1e-3);
    EXPECT_THROW(tail_bound_ax(Matrix::Zero(2, 16), 4, 2, 1.0), DegenerateInputError);
    EXPECT_THROW(tail_bound_ax(A, 4, 2, 1.0, 0.0), ArgumentError);
}

TEST(MomentsToTail, Examples)
{
    MixedMomentBound M;
    M.p0 = 0.0;
    M.terms = {{{0.5, 1.0}}};
    EXPECT_NEAR(moments_to_tail(M, std::numbers::e), std::exp(-1.0), 1e-14);
    M.p0 = 2.0;
    EXPECT_EQ(moments_to_tail(M, 1e-9), 1.0);
}

TEST(MomentsToTail, MaxOverLabelsMinOverTerms)
{
    const double es[3] = {0.5, 1.0, 1.5};
    const double gs[3] = {0.5, 1.0, 2.0};
    const double t = 3.0;
    for (int a = 0; a < 9; ++a) {
        for (int b = 0; b < 9; ++b) {
            MixedMomentBound M;
            M.p0 = 1.0;
            M.terms = {{{es[a / 3], gs[a % 3]}, {es[b / 3], gs[b % 3]}}, {{1.0, 1.0}}};
            const double D = 2.0;
            auto f = [&](double e, double g) { return std::pow(t / (std::numbers::e * D * g), 1.0 / e); };
            const double k0 = std::max(f(es[a / 3], gs[a % 3]), f(es[b / 3], gs[b % 3]));
            const double k1 = f(1.0, 1.0);
            const double expect = std::min(1.0, std::exp(1.0) * std::exp(-std::min(k0, k1)));
            EXPECT_NEAR(moments_to_tail(M, t), expect, 1e-14);
        }
    }
}

TEST(CompareNormDeviation, Examples)
{
    auto e = compare_norm_deviation(1.0, 1.0);
    EXPECT_EQ(e.lower, 0.0);
    EXPECT_EQ(e.upper, 0.0);
    e = compare_norm_deviation(2.0, 1.0);
    EXPECT_NEAR(e.upper, std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(e.lower, std::sqrt(3.0) / 3.0, 1e-15);
    e = compare_norm_deviation(0.0, 1.0);
    EXPECT_NEAR(e.upper, 1.0, 1e-15);
    EXPECT_NEAR(e.lower, 1.0 / 3.0, 1e-15);
    EXPECT_THROW(compare_norm_deviation(1.0, 0.0), ArgumentError);
    EXPECT_THROW(compare_norm_deviation(-1.0, 1.0), ArgumentError);
}

TEST(CompareNormDeviation, EnvelopeContainsGap)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(gen);
        const double b = u(gen) + 1e-3;
        const auto e = compare_norm_deviation(a, b);
        const double gap = std::abs(a - b);
        EXPECT_LE(e.lower, gap * (1 + 1e-12) + 1e-15);
        EXPECT_GE(e.upper * (1 + 1e-12) + 1e-15, gap);
    }
}

TEST(Lift, RandomGramArrays)
{
    std::mt19937_64 gen(12);
    for (int rep = 0; rep < 6; ++rep) {
        const Matrix A = testutil::gaussian_matrix(gen, 3, 9);
        const auto B = gram_array(A, Dims({3, 3}));
        const AxisSet I{1 + rep % 2};
        const auto rest = axis_difference({1, 2}, I);
        const auto parts = all_partitions(axis_union(rest, axis_shift(rest, 2)));
        for (const auto& P : parts) {
            const auto r = verify_lift(B, I, P);
            EXPECT_EQ(r.verdict, Verdict::pass) << P.to_string();
            EXPECT_LT(r.lift_error, 1e-12);
        }
    }
}

TEST(ReducedNormBounds, RandomGramArraysAndUnequalDims)
{
    std::mt19937_64 gen(13);
    for (int rep = 0; rep < 4; ++rep) {
        const Matrix A = testutil::gaussian_matrix(gen, 2, 16);
        const auto B = gram_array(A, Dims({4, 4}));
        for (const AxisSet& I : std::vector<AxisSet>{{}, {1}, {2}}) {
            const auto rest = axis_difference({1, 2}, I);
            for (const auto& P : all_partitions(axis_union(rest, axis_shift(rest, 2)))) {
                EXPECT_EQ(verify_reduced_norm_bounds(B, I, P).verdict, Verdict::pass);
            }
        }
    }
    const auto U = gram_array(testutil::gaussian_matrix(gen, 2, 6), Dims({2, 3}));
    EXPECT_THROW(verify_reduced_norm_bounds(U, {}, make_partition({1, 2, 3, 4}, {{1, 2, 3, 4}})), ArgumentError);
}

TEST(BoundReport, SquareMatrixHasEverything)
{
    const auto rep = make_bound_report(Matrix::Identity(4, 4), Dims({2, 2}), {2, 4, 8}, {0.5, 1, 2}, 1.0, 1.0);
    ASSERT_TRUE(rep.has_main_table);
    ASSERT_TRUE(rep.has_gram_table);
    ASSERT_EQ(rep.rows.size(), 3u);
    ASSERT_EQ(rep.tails.size(), 3u);
    for (const auto& row : rep.rows) {
        double s = 0.0;
        for (double v : row.mp_kappa) {
            s += v;
        }
        EXPECT_NEAR(s, row.mp_main, 1e-12 * row.mp_main);
    }
}

TEST(BoundReport, RectangularAndZero)
{
    std::mt19937_64 gen(14);
    const auto rect = make_bound_report(testutil::gaussian_matrix(gen, 2, 4), Dims({2, 2}), {2}, {1}, 1.0, 1.0);
    EXPECT_FALSE(rect.has_main_table);
    EXPECT_TRUE(rect.has_gram_table);
    EXPECT_FALSE(rect.notes.empty());
    const auto zero = make_bound_report(Matrix::Zero(4, 4), Dims({2, 2}), {2}, {1}, 1.0, 1.0);
    EXPECT_TRUE(zero.has_main_table);
    EXPECT_FALSE(zero.has_gram_table);
    EXPECT_TRUE(zero.tails.empty());
    EXPECT_THROW(make_bound_report(Matrix::Zero(4, 5), Dims({2, 2}), {2}, {}, 1.0, 1.0), ShapeError);
}
