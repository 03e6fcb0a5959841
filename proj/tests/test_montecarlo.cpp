#include "helpers.hpp"

#include "kronchaos/errors.hpp"
#include "kronchaos/montecarlo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace kronchaos;

namespace {

SampleBatch gaussian_batch(std::uint64_t seed, std::size_t S)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    SampleBatch b;
    b.seed = seed;
    b.values.resize(S);
    for (auto& v : b.values) {
        v = g(gen);
    }
    return b;
}

}  // namespace

TEST(Distribution, MomentsAndSupport)
{
    for (auto name : {"gaussian", "rademacher", "uniform_sym", "two_point", "two_point:0.1"}) {
        const auto dist = DistributionSpec::parse(name);
        const CounterRng rng(42, 0);
        const std::size_t S = 200000;
        double m1 = 0.0;
        double m2 = 0.0;
        for (std::size_t k = 0; k < S; ++k) {
            const double v = dist.draw(rng, k);
            m1 += v;
            m2 += v * v;
        }
        m1 /= S;
        m2 /= S;
        EXPECT_LT(std::abs(m1), 5.0 * std::sqrt(m2 / S)) << name;
        EXPECT_NEAR(m2, 1.0, 0.03) << name;
        EXPECT_GT(dist.psi2, 0.0);
        EXPECT_NEAR(absolute_moment(dist, 2.0), 1.0, 1e-12) << name;
    }
    EXPECT_THROW(DistributionSpec::parse("cauchy"), ArgumentError);
    EXPECT_THROW(DistributionSpec::make(Family::two_point, 0.75), ArgumentError);
}

TEST(Distribution, Psi2Constants)
{
    // Rademacher: ||Y||_p = 1, so the sup of 1/sqrt(p) sits at p = 1.
    EXPECT_NEAR(DistributionSpec::make(Family::rademacher).psi2, 1.0, 1e-12);
    // Gaussian: (E|g|^p)^{1/p} / sqrt(p) is largest at p = 1, sqrt(2/pi);
    // the stored constant is rounded up to three digits.
    const double g_psi2 = DistributionSpec::make(Family::gaussian).psi2;
    EXPECT_GE(g_psi2, std::sqrt(2.0 / std::numbers::pi));
    EXPECT_LE(g_psi2, std::sqrt(2.0 / std::numbers::pi) + 1e-3);
    EXPECT_NEAR(absolute_moment(DistributionSpec::make(Family::gaussian), 4.0), std::pow(3.0, 0.25), 1e-12);
    EXPECT_NEAR(absolute_moment(DistributionSpec::make(Family::uniform_sym), 4.0), std::pow(9.0 / 5.0, 0.25),
                1e-12);
    for (Family f : {Family::gaussian, Family::rademacher, Family::uniform_sym, Family::two_point}) {
        const auto dist = DistributionSpec::make(f);
        EXPECT_GE(dist.psi2 * (1 + 1e-12), psi2_numeric(f));
        EXPECT_GE(dist.effective_L(), 1.0);
    }
}

TEST(SampleFactors, RademacherSupportAndDeterminism)
{
    const Dims dims({3, 4, 2});
    const auto dist = DistributionSpec::make(Family::rademacher);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto x = sample_factors(dims, dist, 9, s);
        ASSERT_EQ(x.size(), 3u);
        for (std::size_t l = 0; l < 3; ++l) {
            ASSERT_EQ(static_cast<std::size_t>(x[l].size()), dims.sizes()[l]);
            for (double v : x[l]) {
                EXPECT_TRUE(v == 1.0 || v == -1.0);
            }
        }
    }
    const auto g = DistributionSpec::make(Family::gaussian);
    const auto a = sample_factors(dims, g, 5, 17);
    const auto b = sample_factors(dims, g, 5, 17);
    const auto c = sample_factors(dims, g, 5, 17, stream_copy);
    for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_EQ(a[l], b[l]);
        EXPECT_NE(a[l], c[l]);
    }
}

TEST(SampleFactors, GaussianMeanAndVariance)
{
    const Dims dims({10});
    const auto g = DistributionSpec::make(Family::gaussian);
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const auto x = sample_factors(dims, g, 123, s);
        v.insert(v.end(), x[0].data(), x[0].data() + 10);
    }
    ASSERT_EQ(v.size(), 100000u);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double e : v) {
        var += (e - mean) * (e - mean);
    }
    var /= v.size() - 1;
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(1e5));
    EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(KroneckerVector, Examples)
{
    Vector x(3);
    x << 1.0, -2.0, 0.5;
    EXPECT_EQ(kronecker_vector({x}), x);
    Vector e(2);
    e << 1.0, 0.0;
    Vector y(2);
    y << 3.0, 7.0;
    Vector expect(4);
    expect << 3.0, 7.0, 0.0, 0.0;
    EXPECT_EQ(kronecker_vector({e, y}), expect);

    std::mt19937_64 gen(1);
    const std::vector<Vector> f{testutil::gaussian_vector(gen, 2), testutil::gaussian_vector(gen, 3),
                                testutil::gaussian_vector(gen, 4)};
    const Vector X = kronecker_vector(f);
    EXPECT_LT((X - testutil::kron(f)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(X.norm(), f[0].norm() * f[1].norm() * f[2].norm(), 1e-12 * X.norm());
}

TEST(ChaosStatistic, Examples)
{
    std::mt19937_64 gen(2);
    const std::vector<Vector> f{testutil::gaussian_vector(gen, 2), testutil::gaussian_vector(gen, 3)};
    EXPECT_EQ(chaos_statistic(Matrix::Zero(6, 6), f), 0.0);
    const Matrix A = testutil::gaussian_matrix(gen, 6, 6);
    const Vector X = testutil::kron(f);
    EXPECT_NEAR(chaos_statistic(A, f), X.dot(A * X) - A.trace(), 1e-12);
    EXPECT_THROW(chaos_statistic(Matrix::Zero(5, 5), f), ShapeError);

    // Rademacher entries square to 1, so a diagonal A gives exactly 0.
    const Dims dims({2, 3});
    const auto rad = DistributionSpec::make(Family::rademacher);
    const Matrix D = testutil::gaussian_vector(gen, 6).asDiagonal();
    for (std::uint64_t s = 0; s < 100; ++s) {
        EXPECT_EQ(chaos_statistic(D, sample_factors(dims, rad, 3, s)), 0.0);
    }
}

TEST(ChaosStatistic, IdentityL2)
{
    const std::size_t n = 5;
    const Dims dims({n});
    const auto g = DistributionSpec::make(Family::gaussian);
    const Matrix I = Matrix::Identity(n, n);
    SampleBatch b;
    for (std::uint64_t s = 0; s < 100000; ++s) {
        b.values.push_back(chaos_statistic(I, sample_factors(dims, g, 77, s)));
    }
    EXPECT_NEAR(estimate_lp(b, 2.0).estimate, std::sqrt(2.0 * n), 0.05 * std::sqrt(2.0 * n));
    double m = 0.0;
    double m2 = 0.0;
    for (double v : b.values) {
        m += v;
        m2 += v * v;
    }
    m /= b.values.size();
    const double sd = std::sqrt(m2 / b.values.size() - m * m);
    EXPECT_LE(std::abs(m), 5.0 * sd / std::sqrt(static_cast<double>(b.values.size())));
}

TEST(NormStatistic, Examples)
{
    std::mt19937_64 gen(3);
    const std::vector<Vector> f{testutil::gaussian_vector(gen, 2), testutil::gaussian_vector(gen, 2)};
    const Vector X = testutil::kron(f);
    Matrix row = Matrix::Zero(1, 4);
    row(0, 2) = 1.0;
    EXPECT_NEAR(norm_statistic(row, f), std::abs(X[2]) - 1.0, 1e-15);

    const auto rad = DistributionSpec::make(Family::rademacher);
    const Matrix Id = Matrix::Identity(8, 8);
    for (std::uint64_t s = 0; s < 20; ++s) {
        EXPECT_NEAR(norm_statistic(Id, sample_factors(Dims({2, 4}), rad, 1, s)), 0.0, 1e-14);
    }
    EXPECT_THROW(norm_statistic(Matrix::Zero(2, 3), f), ShapeError);

    // E ||g||^2 = n for d = 1.
    const std::size_t n = 6;
    const auto g = DistributionSpec::make(Family::gaussian);
    const std::size_t S = 20000;
    double sum = 0.0;
    for (std::uint64_t s = 0; s < S; ++s) {
        const double r = norm_statistic(Matrix::Identity(n, n), sample_factors(Dims({n}), g, 8, s)) + std::sqrt(6.0);
        sum += r * r;
    }
    // chi-square with n degrees of freedom has variance 2n.
    EXPECT_NEAR(sum / S, static_cast<double>(n), 3.0 * std::sqrt(2.0 * n / S));
}

TEST(SemiDecoupledTerm, OrderOneCollapses)
{
    std::mt19937_64 gen(4);
    const Matrix A = testutil::gaussian_matrix(gen, 3, 3);
    const auto A2d = rearrange_matrix(A, Dims({3}));
    const std::vector<Vector> x{testutil::gaussian_vector(gen, 3)};
    const std::vector<Vector> xb{testutil::gaussian_vector(gen, 3)};
    EXPECT_NEAR(semi_decoupled_term(A2d, {}, {}, x, xb), x[0].dot(A * xb[0]), 1e-13);
    EXPECT_NEAR(semi_decoupled_term(A2d, {1}, {1}, x, xb), (A.diagonal().array() * (x[0].array().square() - 1)).sum(),
                1e-13);
    double off = 0.0;
    for (long i = 0; i < 3; ++i) {
        for (long j = 0; j < 3; ++j) {
            off += i == j ? 0.0 : A(i, j) * x[0][i] * xb[0][j];
        }
    }
    EXPECT_NEAR(semi_decoupled_term(A2d, {}, {}, x, xb, true), off, 1e-13);
    EXPECT_THROW(semi_decoupled_term(A2d, {}, {1}, x, xb), AxisError);
}

TEST(SemiDecoupledTerm, OrderTwoByLoops)
{
    std::mt19937_64 gen(5);
    const Matrix A = testutil::gaussian_matrix(gen, 6, 6);
    const auto A2d = rearrange_matrix(A, Dims({2, 3}));
    const std::vector<Vector> x{testutil::gaussian_vector(gen, 2), testutil::gaussian_vector(gen, 3)};
    const std::vector<Vector> xb{testutil::gaussian_vector(gen, 2), testutil::gaussian_vector(gen, 3)};
    auto a = [&](long i1, long i2, long j1, long j2) { return A(i1 * 3 + i2, j1 * 3 + j2); };
    // I = {1}, J = {1}: sum_i sum_{k,k'} A_{(i,k),(i,k')} (x1_i^2 - 1) x2_k xb2_k'.
    double e11 = 0.0;
    // I = {2}, J = {}: sum_j sum_{k,k'} A_{(k,j),(k',j)} x1_k xb1_k'.
    double e20 = 0.0;
    for (long i = 0; i < 2; ++i) {
        for (long k = 0; k < 3; ++k) {
            for (long kp = 0; kp < 3; ++kp) {
                e11 += a(i, k, i, kp) * (x[0][i] * x[0][i] - 1) * x[1][k] * xb[1][kp];
            }
        }
    }
    for (long j = 0; j < 3; ++j) {
        for (long k = 0; k < 2; ++k) {
            for (long kp = 0; kp < 2; ++kp) {
                e20 += a(k, j, kp, j) * x[0][k] * xb[0][kp];
            }
        }
    }
    EXPECT_NEAR(semi_decoupled_term(A2d, {1}, {1}, x, xb), e11, 1e-12);
    EXPECT_NEAR(semi_decoupled_term(A2d, {2}, {}, x, xb), e20, 1e-12);
    EXPECT_THROW(semi_decoupled_term(A2d, {1, 2}, {}, x, xb), AxisError);
    EXPECT_THROW(semi_decoupled_term(A2d, {1}, {2}, x, xb), AxisError);
}

TEST(SemiDecoupledTerm, RademacherSquareTermsVanish)
{
    std::mt19937_64 gen(6);
    const Dims dims({2, 2});
    const auto A2d = rearrange_matrix(testutil::gaussian_matrix(gen, 4, 4), dims);
    const auto rad = DistributionSpec::make(Family::rademacher);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = sample_factors(dims, rad, 2, s);
        const auto xb = sample_factors(dims, rad, 2, s, stream_copy);
        EXPECT_EQ(semi_decoupled_term(A2d, {1}, {1}, x, xb), 0.0);
        EXPECT_EQ(semi_decoupled_term(A2d, {2}, {2}, x, xb), 0.0);
        EXPECT_EQ(semi_decoupled_term(A2d, {1, 2}, {1}, x, xb), 0.0);
        EXPECT_EQ(semi_decoupled_term(A2d, {1, 2}, {1, 2}, x, xb), 0.0);
    }
}

TEST(EstimateLp, Examples)
{
    SampleBatch c;
    c.values.assign(500, -2.5);
    for (double p : {1.0, 2.0, 7.0, 16.0}) {
        const auto m = estimate_lp(c, p);
        EXPECT_NEAR(m.estimate, 2.5, 1e-14);
        EXPECT_LE(m.ci_low, m.estimate);
        EXPECT_GE(m.ci_high, m.estimate);
    }
    SampleBatch pm;
    for (int k = 0; k < 300; ++k) {
        pm.values.push_back(k % 2 ? 1.0 : -1.0);
    }
    EXPECT_NEAR(estimate_lp(pm, 5.0).estimate, 1.0, 1e-14);
    EXPECT_NEAR(estimate_lp(gaussian_batch(9, 100000), 2.0).estimate, 1.0, 0.03);
    EXPECT_THROW(estimate_lp(SampleBatch{}, 2.0), ArgumentError);
    EXPECT_THROW(estimate_lp(pm, 0.5), ArgumentError);
}

TEST(EstimateLp, OverflowSafeAndMonotone)
{
    SampleBatch big;
    big.values = {1e300, -1e300, 1e299};
    EXPECT_TRUE(std::isfinite(estimate_lp(big, 16.0).estimate));
    const auto b = gaussian_batch(10, 5000);
    double prev = 0.0;
    for (double p = 1.0; p <= 16.0; p += 0.5) {
        const auto m = estimate_lp(b, p);
        EXPECT_GE(m.estimate, prev);
        EXPECT_LE(m.ci_low, m.estimate);
        EXPECT_GE(m.ci_high, m.estimate);
        prev = m.estimate;
    }
    // The bootstrap band is a function of the batch alone.
    const auto m1 = estimate_lp(b, 4.0);
    const auto m2 = estimate_lp(b, 4.0);
    EXPECT_EQ(m1.ci_low, m2.ci_low);
    EXPECT_EQ(m1.ci_high, m2.ci_high);
}

TEST(EstimateTail, Examples)
{
    SampleBatch b;
    b.values = {0.5, -1.0, 2.0, 3.0};
    EXPECT_EQ(estimate_tail(b, 0.0).frequency, 1.0);
    EXPECT_EQ(estimate_tail(b, 3.0).frequency, 0.0);
    EXPECT_EQ(estimate_tail(b, 1.0).exceed, 2u);
    const auto g = estimate_tail(gaussian_batch(11, 100000), 1.96);
    EXPECT_NEAR(g.frequency, 0.05, 0.005);
    EXPECT_LE(g.ci_low, g.frequency);
    EXPECT_GE(g.ci_high, g.frequency);
    // Wilson interval for 0 of S.
    const auto z = estimate_tail(b, 10.0);
    EXPECT_EQ(z.ci_low, 0.0);
    const double zz = 1.959963984540054 * 1.959963984540054;
    EXPECT_NEAR(z.ci_high, zz / (4.0 + zz), 1e-6);
}

TEST(BandVerdict, Cases)
{
    EXPECT_EQ(band_verdict(0.0, 1.0, 2.0, 3.0), Verdict::pass);
    EXPECT_EQ(band_verdict(2.0, 3.0, 0.0, 1.0), Verdict::fail);
    EXPECT_EQ(band_verdict(0.0, 2.0, 1.0, 3.0), Verdict::inconclusive_pass);
}

TEST(RandomGaussianMatrix, Deterministic)
{
    const Matrix a = random_gaussian_matrix(3, 4, 99);
    EXPECT_EQ(a, random_gaussian_matrix(3, 4, 99));
    EXPECT_NE(a, random_gaussian_matrix(3, 4, 100));
    EXPECT_EQ(a.rows(), 3);
    EXPECT_EQ(a.cols(), 4);
}
