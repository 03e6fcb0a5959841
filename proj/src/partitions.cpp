#include "kronchaos/partitions.hpp"

#include "kronchaos/errors.hpp"

#include <algorithm>

namespace kronchaos {

namespace {

constexpr std::size_t max_subset_ground = 16;
constexpr std::size_t max_partition_ground = 12;

// Extends the restricted growth string rgs[0..pos) and emits every completion
// whose maximum value is kappa - 1.
void extend_rgs(const AxisSet& T, int kappa, std::vector<int>& rgs, std::size_t pos, int used,
                std::vector<Partition>& out)
{
    const auto n = T.size();
    if (pos == n) {
        if (used != kappa) {
            return;
        }
        Partition P{T, std::vector<AxisSet>(static_cast<std::size_t>(kappa))};
        for (std::size_t k = 0; k < n; ++k) {
            P.blocks[static_cast<std::size_t>(rgs[k])].push_back(T[k]);
        }
        out.push_back(std::move(P));
        return;
    }
    // Not enough positions left to open the remaining blocks.
    if (static_cast<std::size_t>(kappa - used) > n - pos) {
        return;
    }
    for (int v = 0; v <= used && v < kappa; ++v) {
        rgs[pos] = v;
        extend_rgs(T, kappa, rgs, pos + 1, v == used ? used + 1 : used, out);
    }
}

}  // namespace

std::string Partition::to_string() const
{
    std::string s;
    for (const auto& block : blocks) {
        s += '{';
        for (std::size_t k = 0; k < block.size(); ++k) {
            if (k > 0) {
                s += ',';
            }
            s += std::to_string(block[k]);
        }
        s += '}';
    }
    return s;
}

Partition make_partition(const AxisSet& ground, std::vector<AxisSet> blocks)
{
    AxisSet covered;
    for (auto& block : blocks) {
        block = make_axis_set(std::move(block));
        if (block.empty()) {
            throw AxisError("partition blocks must be nonempty");
        }
        if (!axis_intersection(covered, block).empty()) {
            throw AxisError("partition blocks overlap");
        }
        covered = axis_union(covered, block);
    }
    if (covered != ground) {
        throw AxisError("partition blocks do not cover the ground set");
    }
    std::sort(blocks.begin(), blocks.end(), [](const AxisSet& a, const AxisSet& b) { return a.front() < b.front(); });
    return Partition{ground, std::move(blocks)};
}

std::vector<AxisSet> subsets(const AxisSet& T)
{
    if (T.size() > max_subset_ground) {
        throw SizeError("subsets: ground set larger than 16");
    }
    const std::size_t count = std::size_t{1} << T.size();
    std::vector<AxisSet> out;
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        AxisSet S;
        for (std::size_t k = 0; k < T.size(); ++k) {
            if (mask & (std::size_t{1} << k)) {
                S.push_back(T[k]);
            }
        }
        out.push_back(std::move(S));
    }
    return out;
}

std::vector<Partition> partitions_into(const AxisSet& T, int kappa)
{
    if (T.size() > max_partition_ground) {
        throw SizeError("partitions_into: ground set larger than 12");
    }
    if (kappa < 1 || static_cast<std::size_t>(kappa) > T.size()) {
        throw ArgumentError("partitions_into: kappa must lie in [1, |T|]");
    }
    std::vector<Partition> out;
    std::vector<int> rgs(T.size(), 0);
    extend_rgs(T, kappa, rgs, 0, 0, out);
    return out;
}

std::vector<Partition> all_partitions(const AxisSet& T)
{
    std::vector<Partition> out;
    for (int kappa = 1; static_cast<std::size_t>(kappa) <= T.size(); ++kappa) {
        auto part = partitions_into(T, kappa);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

int signed_subset_sum(const AxisSet& T)
{
    int sum = 0;
    for (const auto& S : subsets(T)) {
        sum += (S.size() % 2 == 0) ? 1 : -1;
    }
    return sum;
}

Partition merge_blocks(const Partition& P, std::size_t a, std::size_t b)
{
    if (a == b || a >= P.size() || b >= P.size()) {
        throw ArgumentError("merge_blocks: need two distinct block positions");
    }
    std::vector<AxisSet> blocks;
    for (std::size_t k = 0; k < P.size(); ++k) {
        if (k != a && k != b) {
            blocks.push_back(P.blocks[k]);
        }
    }
    blocks.push_back(axis_union(P.blocks[a], P.blocks[b]));
    return make_partition(P.ground, std::move(blocks));
}

}  // namespace kronchaos
