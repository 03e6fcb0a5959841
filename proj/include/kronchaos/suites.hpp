#pragma once

// Verification suites: Monte Carlo inequality checks with confidence bands,
// exact algebraic identities, and norm-inequality sweeps.

#include "kronchaos/bounds.hpp"
#include "kronchaos/montecarlo.hpp"
#include "kronchaos/tensor_norms.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kronchaos {

struct MonteCarloOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

// ------------------------------------------------------------ decoupling

struct DecouplingTerm {
    AxisSet I;
    AxisSet J;
    double weight = 1.0;
    std::vector<EmpiricalMoment> moments;  // one per p
};

struct DecouplingRow {
    double p = 2.0;
    EmpiricalMoment lhs;
    double rhs = 0.0;
    double rhs_low = 0.0;
    double rhs_high = 0.0;
    Verdict verdict = Verdict::pass;
};

struct DecouplingReport {
    std::vector<DecouplingTerm> terms;
    std::vector<DecouplingRow> rows;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

/// ||X^T A X - trace A||_p <= sum_{J subset I, I \ J != [d]} 4^{d-|I|}
/// ||semi_decoupled_term(I, J)||_p with independent copies on a second stream.
/// The right side's band is the weighted sum of the per-term bands.
DecouplingReport verify_decoupling(const Matrix& A, const Dims& dims, const DistributionSpec& dist,
                                   const std::vector<double>& p_grid, const MonteCarloOptions& mc);

// ------------------------------------------------------------ moment sandwich

struct RatioRow {
    double p = 2.0;
    std::uint64_t seed = 0;
    EmpiricalMoment empirical;
    double mp = 0.0;
    double ratio = 0.0;
    double ratio_low = 0.0;
    double ratio_high = 0.0;
};

struct MainUpperReport {
    double L = 1.0;
    double ceiling = 1.0;
    std::vector<RatioRow> rows;
    double max_ratio = 0.0;
    bool mp_has_lower_bounds = false;
    std::vector<std::string> warnings;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

/// Ratios empirical L_p / m_p with L = dist.effective_L(). Passes while every
/// ratio band stays below `ceiling`; a band entirely above it is a failure
/// only when m_p comes from exact norms (ALS makes m_p a lower bound).
MainUpperReport verify_main_upper(const Matrix& A, const Dims& dims, const DistributionSpec& dist,
                                  const std::vector<double>& p_grid, const MonteCarloOptions& mc,
                                  double ceiling = 1.0, const NormOptions& norm_opts = {});

struct MainLowerReport {
    std::vector<std::uint64_t> seeds;
    std::vector<RatioRow> rows;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    /// Largest |r - mean| / mean over seeds, for each p in p_grid order.
    std::vector<double> spread;
    double stability_tolerance = 0.15;
    bool stable = true;
    bool mp_has_lower_bounds = false;
    std::vector<std::string> warnings;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

/// Gaussian entries only. The array of A must satisfy check_symmetry
/// (PreconditionError otherwise); A = 0 gives a skipped report. Runs one
/// replicate per seed (`replicates` seeds derived from mc.seed).
MainLowerReport verify_main_lower(const Matrix& A, const Dims& dims, const std::vector<double>& p_grid,
                                  const MonteCarloOptions& mc, int replicates = 3, const NormOptions& norm_opts = {});

// ------------------------------------------------------------ tails

struct TailRow {
    TailFrequency empirical;
    double bound_fitted = 1.0;
    double bound_knob = 1.0;
};

struct AxTailReport {
    double knob_C = 1.0;
    double fitted_C = 0.0;
    std::vector<TailRow> rows;
    bool monotone = true;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

/// Tail frequencies of | ||AX||_2 - ||A||_F | against tail_bound_ax. The
/// fitted constant is the largest C keeping the bound above every Wilson
/// upper limit. A needs n^d columns with equal dims n.
AxTailReport verify_ax_tail(const Matrix& A, const Dims& dims, const DistributionSpec& dist,
                            const std::vector<double>& t_grid, const MonteCarloOptions& mc, double knob_C = 1.0);

struct HansonWrightReport {
    double K = 1.0;
    double knob_c = 1.0;
    double fitted_c = 0.0;
    std::vector<TailRow> rows;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

/// d = 1 baseline: P(|X^T A X - E| > t) against
/// 2 exp(-c min{t^2 / (K^4 ||A||_F^2), t / (K^2 ||A||)}), K = dist.psi2.
/// bound_knob evaluates the envelope at c = knob_c.
HansonWrightReport verify_hanson_wright(const Matrix& A, const DistributionSpec& dist,
                                        const std::vector<double>& t_grid, const MonteCarloOptions& mc,
                                        double knob_c = 1.0);

// ------------------------------------------------------------ gaussian decoupling

struct GaussianDecouplingRow {
    double p = 2.0;
    EmpiricalMoment lhs;  // sum a_k (g_k^2 - 1)
    EmpiricalMoment rhs;  // 2 sum a_k g_k gbar_k
    Verdict verdict = Verdict::pass;
    /// p = 2 only: the exact values sqrt(2) ||a|| and 2 ||a||.
    bool has_exact = false;
    double exact_lhs = 0.0;
    double exact_rhs = 0.0;
    double lhs_rel_error = 0.0;
    double rhs_rel_error = 0.0;
};

struct GaussianDecouplingReport {
    double exact_tolerance = 0.03;
    std::vector<GaussianDecouplingRow> rows;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

GaussianDecouplingReport verify_gaussian_decoupling(const Vector& a, const std::vector<double>& p_grid,
                                                    const MonteCarloOptions& mc, double exact_tolerance = 0.03);

// ------------------------------------------------------------ exact suites

struct IdentityRow {
    std::string name;
    int instances = 0;
    double max_rel_error = 0.0;
    double tolerance = 1e-10;
    Verdict verdict = Verdict::pass;
};

struct IdentitiesReport {
    std::vector<IdentityRow> rows;
    Verdict verdict = Verdict::pass;
};

/// Random instances with d in {1, 2, 3} (cycled), n_l <= 3 or 4:
///   rearrangement      sum B prod x^2 = sum_I sum B^(I) prod_{I^c} (x^2 - 1)
///   inverse            sum_I sum A ... prod_I (x x' - 1{i = i'}) = X^T A X
///   symmetrize         X^T A X unchanged and check_symmetry holds
///   decoupling         sum over (I, J) != ([d], {}) of the distinct-pair
///                      terms equals X^T A X - trace A
///   signed subsets     sum_{S subset T} (-1)^{|S|} = [T empty]
IdentitiesReport run_identities(std::uint64_t seed, int instances = 100);

struct NormSuiteRow {
    std::string name;
    int instances = 0;
    int passed = 0;
    int inconclusive = 0;
    int failed = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::pass;
};

struct NormsReport {
    std::vector<NormSuiteRow> rows;
    Verdict verdict = Verdict::pass;
};

/// Spectral route vs an eigenvalue oracle (and forced ALS), merge/split,
/// diagonal restriction, lift and reduced-norm bounds on random arrays.
NormsReport run_norm_suite(std::uint64_t seed, int instances = 50, const NormOptions& norm_opts = {});

/// Relative gap |lhs - rhs| / max(|lhs|, |rhs|, scale).
double relative_gap(double lhs, double rhs, double scale);

}  // namespace kronchaos
