#pragma once

// Partition norms ||B||_{I_1,...,I_kappa}: the supremum of
// sum_i B_i a1_{i_I1} ... ak_{i_Ikappa} over unit-Frobenius blocks a1..ak.

#include "kronchaos/partitions.hpp"
#include "kronchaos/tensor_core.hpp"
#include "kronchaos/verdict.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kronchaos {

enum class NormMethod { frobenius_exact, spectral_exact, als, brute_force };

std::string to_string(NormMethod m);

/// One block vector per partition block, each flattened row-major over the
/// block's axes in label order.
using BlockFactors = std::vector<Vector>;

struct NormCandidate {
    double value = 0.0;
    BlockFactors factors;
    bool converged = true;
    int iterations = 0;
};

struct NormEstimate {
    double value = 0.0;
    NormMethod method = NormMethod::frobenius_exact;
    int restarts_used = 0;
    /// True when value is a feasible-point value (ALS, brute force): the true
    /// norm is at least this large, possibly larger.
    bool certified_lower_bound = false;
    /// False when some ALS restart hit the iteration cap.
    bool converged = true;
    std::string warning;
    /// The maximizing blocks.
    BlockFactors factors;
    /// Every restart (one entry for exact methods), in restart order.
    std::vector<NormCandidate> candidates;

    [[nodiscard]] bool exact() const { return !certified_lower_bound; }
};

struct NormOptions {
    int restarts = 32;
    std::uint64_t seed = 0x6b72636e6f726d73ull;
    double tolerance = 1e-10;
    int max_iterations = 500;
    bool force_als = false;
    bool force_brute_force = false;
    /// Approximate number of grid points for brute force.
    std::size_t grid_budget = 200000;
    unsigned threads = 1;
    /// Extra ALS starting points (any factors; normalized before use).
    std::vector<BlockFactors> warm_starts;
};

/// Matrix with rows indexed by row_axes and columns by col_axes, each
/// flattened row-major in label order. AxisError unless the two sets
/// partition the labels of B and are both nonempty.
Matrix matricize(const TensorArray& B, const AxisSet& row_axes, const AxisSet& col_axes);

/// Product of B's extents over a block.
std::size_t block_dimension(const TensorArray& B, const AxisSet& block);

/// AxisError unless P.ground equals B's labels.
NormEstimate tensor_norm(const TensorArray& B, const Partition& P, const NormOptions& opts = {});

/// sum_i B_i prod_b factors[b]_{i_{P_b}}; factors need not be normalized.
double multilinear_form(const TensorArray& B, const Partition& P, const BlockFactors& factors);

/// Contraction of B against every block factor except `free_block`: the
/// vector over the free block's coordinates.
Vector contract_except(const TensorArray& B, const Partition& P, const BlockFactors& factors, std::size_t free_block);

/// A^[I]: entries with i_l != i'_l for some l in I set to zero.
TensorArray diagonal_restriction(const TensorArray& A2d, const AxisSet& I);

struct MergeSplitReport {
    Partition split;
    Partition merged;
    NormEstimate split_norm;
    NormEstimate merged_norm;
    /// Largest |merged objective at lifted point - split objective| over
    /// restarts, relative to frobenius(B).
    double lift_error = 0.0;
    double sqrt_min_factor = 1.0;
    InequalityCheck lower;
    InequalityCheck upper;
    Verdict verdict = Verdict::pass;
};

/// Both sides of: split norm <= merged norm <= sqrt(min(N_a, N_b)) * split
/// norm, where blocks a and b (positions in P_split) are merged.
MergeSplitReport verify_merge_split(const TensorArray& B, const Partition& split, std::size_t a, std::size_t b,
                                    const NormOptions& opts = {});

struct DiagonalRestrictionReport {
    NormEstimate restricted;
    NormEstimate full;
    InequalityCheck check;
    Verdict verdict = Verdict::pass;
};

DiagonalRestrictionReport verify_diagonal_restriction(const TensorArray& A2d, const AxisSet& I, const Partition& P,
                                                      const NormOptions& opts = {});

}  // namespace kronchaos
