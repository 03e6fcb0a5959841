#pragma once

#include "kronchaos/tensor_core.hpp"

#include <string>
#include <vector>

namespace kronchaos {

/// A set partition of `ground` into nonempty disjoint blocks. Blocks are
/// sorted internally and ordered by their minimum element, so every set
/// partition has exactly one representation.
struct Partition {
    AxisSet ground;
    std::vector<AxisSet> blocks;

    [[nodiscard]] std::size_t size() const { return blocks.size(); }
    /// e.g. "{1,3}{2}"
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Builds a canonical partition from arbitrary blocks; AxisError when the
/// blocks are empty, overlap, or do not cover `ground`.
Partition make_partition(const AxisSet& ground, std::vector<AxisSet> blocks);

/// All 2^|T| subsets in binary-counting order on sorted T. |T| <= 16.
std::vector<AxisSet> subsets(const AxisSet& T);

/// All partitions of T into exactly kappa blocks, in lexicographic order of
/// their restricted growth strings. 1 <= kappa <= |T| <= 12.
std::vector<Partition> partitions_into(const AxisSet& T, int kappa);

/// Partitions of T into any number of blocks (kappa = 1..|T|).
std::vector<Partition> all_partitions(const AxisSet& T);

/// sum_{S subset T} (-1)^{|S|}, by literal summation over subsets(T).
int signed_subset_sum(const AxisSet& T);

/// Merges blocks a and b (0-based positions) into one block.
Partition merge_blocks(const Partition& P, std::size_t a, std::size_t b);

}  // namespace kronchaos
