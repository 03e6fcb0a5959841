#pragma once

// Closed-form bound quantities for Kronecker-structured chaos X^T A X and for
// ||AX||_2 - ||A||_F, with X = x^(1) (x) ... (x) x^(d).
//
// Arrays on doubled dims carry labels 1..2d; the reduced arrays keep the
// labels of their parent so that partitions can be written against them.

#include "kronchaos/partitions.hpp"
#include "kronchaos/tensor_core.hpp"
#include "kronchaos/tensor_norms.hpp"
#include "kronchaos/verdict.hpp"

#include <string>
#include <vector>

namespace kronchaos {

/// sum_k A_{k + k}: the trace of the underlying matrix.
double expected_chaos(const TensorArray& A2d);

/// A^(I)_{i + i'} = sum_{k in J(I)} A_{(i x k) + (i' x k)}, an array on
/// I^c u (I^c + d). I = {} returns A2d, I = [d] the scalar trace.
TensorArray build_reduced_array(const TensorArray& A2d, const AxisSet& I);

/// A^(I,J): the I \ J axes are summed out as in build_reduced_array and the J
/// axes are kept but only on their diagonal (i_l = i'_l). AxisError unless
/// J is a subset of I and I a subset of [d].
TensorArray build_reduced_array_diag(const TensorArray& A2d, const AxisSet& I, const AxisSet& J);

/// For an array B (any labels) and a subset I of its labels:
/// B^(I)_i = sum_{k in J(I)} B_{i x k}, an array on labels \ I.
TensorArray sum_out_axes(const TensorArray& B, const AxisSet& I);

/// 2^-d sum over I of A with coordinates l in I swapped between the two
/// halves. The result satisfies check_symmetry exactly.
TensorArray symmetrize(const TensorArray& A2d);

/// True iff swapping i_l and i'_l leaves every entry unchanged, for every l.
bool check_symmetry(const TensorArray& A2d);

/// One partition norm of a reduced array.
struct NormTerm {
    AxisSet I;
    Partition partition;
    NormEstimate norm;

    [[nodiscard]] int kappa() const { return static_cast<int>(partition.size()); }
};

/// Norm estimates behind an m_p value. They do not depend on p or L, so one
/// table serves a whole p grid.
struct NormTable {
    std::size_t d = 0;
    /// Largest possible block count (d for the decoupled form, 2d otherwise).
    int max_kappa = 0;
    std::vector<NormTerm> terms;

    [[nodiscard]] std::vector<std::string> warnings() const;
    [[nodiscard]] bool has_lower_bounds() const;
};

/// ||B||_P for every partition P of B's labels (the decoupled form).
NormTable partition_norm_table(const TensorArray& B, const NormOptions& opts = {});

/// ||A^(I)||_P for every I != [d] and every partition P of I^c u (I^c + d).
NormTable reduced_norm_table(const TensorArray& A2d, const NormOptions& opts = {});

/// sum of norms over terms with kappa blocks, at index kappa - 1. Block counts
/// with no partitions contribute 0.
std::vector<double> kappa_sums(const NormTable& table);

/// sum_kappa p^{kappa/2} sum_{P in S([d], kappa)} ||B||_P.
double mp_decoupled_from(const NormTable& table, double p);
/// L^{2d} sum_kappa p^{kappa/2} sum_{I != [d]} sum_P ||A^(I)||_P.
double mp_main_from(const NormTable& table, double p, double L);
/// L^{2d} sum_kappa min{p^{kappa/2} m_kappa / ||A||_F, p^{kappa/4} sqrt(m_kappa)}
/// with m_kappa the kappa sums of the table built from B = A^T A.
double mp_norm_from(const NormTable& table, double p, double L, double frobenius_A);

/// p >= 1.
double mp_decoupled(const TensorArray& B, double p, const NormOptions& opts = {});
/// p >= 2, L >= 1.
double mp_main(const TensorArray& A2d, double p, double L, const NormOptions& opts = {});
/// A is n0 x N with N = dims.total(); p >= 2, L >= 1. DegenerateInputError
/// for A = 0.
double mp_norm(const Matrix& A, const Dims& dims, double p, double L, const NormOptions& opts = {});
/// Rearranged A^T A, the array whose reduced norms enter mp_norm.
TensorArray gram_array(const Matrix& A, const Dims& dims);

struct TailBound {
    double value = 1.0;
    /// Regimes whose expression attains the minimum, in order 1..3; empty
    /// when no regime applies (t outside every range).
    std::vector<int> regimes;
    /// Every applicable regime with its unclipped value.
    std::vector<std::pair<int, double>> evaluated;
};

/// P(| ||AX||_2 - ||A||_F | > t) bound for A of size n0 x n^d and knob C:
///   1: e^2 exp(-C t^2 / (n^{d-1} ||A||^2))          t <= n^{d/2} ||A||
///   2: e^2 exp(-C (t / ||A||)^{2/d})                t >= n^{d/2} ||A||
///   3: e^2 exp(-C t^2 / (n^{(d-1)/2} ||A||_F^2))    n^{(d-1)/4}||A|| <= t <= n^{(d-1)/4}||A||_F
/// (||A|| the spectral norm). Minimum over applicable regimes, clipped to
/// [0, 1].
TailBound tail_bound_ax(const Matrix& A, std::size_t n, std::size_t d, double t, double C = 1.0);
/// The factors x_r of every applicable regime r, where regime r reads
/// e^2 exp(-C x_r).
std::vector<std::pair<int, double>> tail_exponents(const Matrix& A, std::size_t n, std::size_t d, double t);

struct MomentTerm {
    double exponent = 0.5;
    double scale = 1.0;
};

/// ||X||_p <= sum_k min_l p^{e_kl} gamma_kl for p >= p0.
struct MixedMomentBound {
    double p0 = 0.0;
    /// terms[k][l]
    std::vector<std::vector<MomentTerm>> terms;
};

/// e^{p0} exp(-min_k max_l (t / (e D gamma_kl))^{1/e_kl}), D = terms.size(),
/// clipped to [0, 1]. t > 0.
double moments_to_tail(const MixedMomentBound& M, double t);

struct DeviationEnvelope {
    double lower = 0.0;
    double upper = 0.0;
};

/// (m / 3, m) with m = min{|a^2 - b^2| / b, sqrt|a^2 - b^2|}; |a - b| lies in
/// between. a >= 0, b > 0, otherwise ArgumentError.
DeviationEnvelope compare_norm_deviation(double a, double b);

/// ||B^(I)||_P <= sqrt(prod_{l in I} n_l) ||B||_{P + {l, l+d} for l in I}.
/// The optimizer of the left side lifts to a feasible point of the extended
/// partition (diagonal blocks 1/sqrt(n_l)); lift_error measures that identity.
struct LiftReport {
    NormEstimate reduced;
    NormEstimate extended;
    Partition extended_partition;
    double lift_error = 0.0;
    InequalityCheck check;
    Verdict verdict = Verdict::pass;
};

LiftReport verify_lift(const TensorArray& B2d, const AxisSet& I, const Partition& P, const NormOptions& opts = {});

/// With equal dims n and kappa = |P|:
///   ||B^(I)||_P <= n^{|I|/2} ||B||_F  and  ||B^(I)||_P <= n^{d - kappa/2} ||B||_2,
/// ||B||_2 the spectral norm of the underlying matrix.
struct ReducedNormBoundsReport {
    NormEstimate reduced;
    InequalityCheck frobenius_bound;
    InequalityCheck spectral_bound;
    Verdict verdict = Verdict::pass;
};

ReducedNormBoundsReport verify_reduced_norm_bounds(const TensorArray& B2d, const AxisSet& I, const Partition& P,
                                                   const NormOptions& opts = {});

/// Everything the bound formulas give for one matrix. The m_p table (and
/// mp_main) needs A square with side N; mp_norm and the tail curve need
/// A != 0, and the tail curve equal dims.
struct BoundRow {
    double p = 2.0;
    bool has_main = false;
    double mp_main = 0.0;
    /// L^{2d} p^{kappa/2} times the kappa sum, index kappa - 1.
    std::vector<double> mp_kappa;
    bool has_norm = false;
    double mp_norm = 0.0;
};

struct TailRowBound {
    double t = 0.0;
    TailBound bound;
};

struct BoundReport {
    std::vector<std::size_t> dims;
    double L = 1.0;
    double C_tail = 1.0;
    bool has_main_table = false;
    NormTable main_table;
    bool has_gram_table = false;
    NormTable gram_table;
    std::vector<BoundRow> rows;
    std::vector<TailRowBound> tails;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
};

/// p values must be >= 2; t values >= 0.
BoundReport make_bound_report(const Matrix& A, const Dims& dims, const std::vector<double>& p_grid,
                              const std::vector<double>& t_grid, double L, double C_tail,
                              const NormOptions& opts = {});

}  // namespace kronchaos
