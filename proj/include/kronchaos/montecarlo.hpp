#pragma once

// Seeded sampling of Kronecker vectors, per-sample statistics and empirical
// moment / tail estimators with confidence bands.

#include "kronchaos/random.hpp"
#include "kronchaos/tensor_core.hpp"
#include "kronchaos/verdict.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kronchaos {

enum class Family { gaussian, rademacher, uniform_sym, two_point };

/// Mean 0, variance 1 entry distribution with its psi_2 norm
/// sup_{p >= 1} ||Y||_p / sqrt(p).
struct DistributionSpec {
    Family family = Family::gaussian;
    /// two_point only: P(Y = +a) = P(Y = -a) = q, P(Y = 0) = 1 - 2q, a = 1/sqrt(2q).
    double q = 0.25;
    double psi2 = 0.0;

    static DistributionSpec make(Family family, double q = 0.25);
    /// "gaussian", "rademacher", "uniform_sym", "two_point" or "two_point:<q>".
    static DistributionSpec parse(const std::string& name);

    [[nodiscard]] std::string name() const;
    /// The subgaussian bound used in m_p, which requires L >= 1.
    [[nodiscard]] double effective_L() const { return psi2 < 1.0 ? 1.0 : psi2; }
    /// One entry; a pure function of (rng, index).
    [[nodiscard]] double draw(const CounterRng& rng, std::uint64_t index) const;
};

/// (E|Y|^p)^{1/p} in closed form.
double absolute_moment(const DistributionSpec& dist, double p);
/// max over a fine p grid on [1, 64] of absolute_moment(p) / sqrt(p).
double psi2_numeric(Family family, double q = 0.25);

/// Stream constants: factors and their independent copies.
inline constexpr std::uint64_t stream_primary = 0;
inline constexpr std::uint64_t stream_copy = 1;

/// d vectors with i.i.d. entries; entry j of axis l for sample s is drawn from
/// counter (s * N_sum + offset_l + j) on the given stream, N_sum = sum n_l.
std::vector<Vector> sample_factors(const Dims& dims, const DistributionSpec& dist, std::uint64_t seed,
                                   std::uint64_t sample = 0, std::uint64_t stream = stream_primary);

/// x^(1) (x) ... (x) x^(d), axis 1 slowest.
Vector kronecker_vector(const std::vector<Vector>& factors);

/// X^T A X - trace(A).
double chaos_statistic(const Matrix& A, const std::vector<Vector>& factors);
/// ||AX||_2 - ||A||_F.
double norm_statistic(const Matrix& A, const std::vector<Vector>& factors);

/// sum A_{(i x j x k) + (i x j x k')} prod_{l in J} [x_l(i_l)^2 - 1]
///   prod_{l in I^c} x_l(k_l) xbar_l(k'_l)
/// over i on J, j on I \ J, k, k' on I^c. With `distinct_pairs`, only
/// k_l != k'_l for every l in I^c is summed. AxisError unless J is a subset
/// of I, I of [d], and I \ J != [d].
double semi_decoupled_term(const TensorArray& A2d, const AxisSet& I, const AxisSet& J,
                           const std::vector<Vector>& factors, const std::vector<Vector>& factors_bar,
                           bool distinct_pairs = false);

struct SampleBatch {
    std::uint64_t seed = 0;
    std::vector<double> values;
};

struct EmpiricalMoment {
    double p = 2.0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t samples = 0;
};

inline constexpr int bootstrap_resamples = 200;

/// ((1/S) sum |v|^p)^{1/p} with a 95% percentile bootstrap band (200
/// resamples). ArgumentError for an empty batch or p < 1.
EmpiricalMoment estimate_lp(const SampleBatch& batch, double p);

struct TailFrequency {
    double t = 0.0;
    double frequency = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t exceed = 0;
    std::size_t samples = 0;
};

/// Fraction of |v| > t with a 95% Wilson interval.
TailFrequency estimate_tail(const SampleBatch& batch, double t);

/// Band logic for lhs <= rhs given 95% bands: pass when they separate in the
/// right direction, fail when they separate in the wrong one, otherwise
/// inconclusive_pass.
Verdict band_verdict(double lhs_low, double lhs_high, double rhs_low, double rhs_high);

/// Standard normal N x M matrix from a seed (entries on stream 7).
Matrix random_gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace kronchaos
