#include "kronchaos/tensor_norms.hpp"

#include "kronchaos/errors.hpp"
#include "kronchaos/parallel.hpp"
#include "kronchaos/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kronchaos {

namespace {

// B with, for every entry, its flat coordinate inside each block.
struct Grouped {
    std::span<const double> data;
    std::vector<std::size_t> block_dims;
    std::vector<std::vector<std::uint32_t>> coord;  // [block][entry]
};

Grouped group(const TensorArray& B, const std::vector<AxisSet>& blocks)
{
    const auto k = B.order();
    std::vector<std::size_t> block_of(k);
    std::vector<std::size_t> stride_in_block(k);
    Grouped g;
    g.data = B.data();
    g.block_dims.assign(blocks.size(), 1);
    for (std::size_t b = blocks.size(); b-- > 0;) {
        for (auto it = blocks[b].rbegin(); it != blocks[b].rend(); ++it) {
            const auto p = B.position(*it);
            block_of[p] = b;
            stride_in_block[p] = g.block_dims[b];
            g.block_dims[b] *= B.shape()[p];
        }
    }
    g.coord.assign(blocks.size(), std::vector<std::uint32_t>(B.size()));
    Odometer odo(B.shape());
    for (std::size_t e = 0; e < B.size(); ++e, odo.advance()) {
        for (std::size_t p = 0; p < k; ++p) {
            g.coord[block_of[p]][e] += static_cast<std::uint32_t>(odo.index()[p] * stride_in_block[p]);
        }
    }
    return g;
}

void check_partition_of(const TensorArray& B, const Partition& P)
{
    if (P.ground != B.labels()) {
        throw AxisError("partition ground set " + P.to_string() + " does not match the array labels");
    }
}

Vector contract(const Grouped& g, const BlockFactors& f, std::size_t free_block)
{
    Vector v = Vector::Zero(static_cast<Eigen::Index>(g.block_dims[free_block]));
    const auto kappa = g.block_dims.size();
    for (std::size_t e = 0; e < g.data.size(); ++e) {
        double w = g.data[e];
        if (w == 0.0) {
            continue;
        }
        for (std::size_t c = 0; c < kappa; ++c) {
            if (c != free_block) {
                w *= f[c][g.coord[c][e]];
            }
        }
        v[g.coord[free_block][e]] += w;
    }
    return v;
}

double evaluate(const Grouped& g, const BlockFactors& f)
{
    double s = 0.0;
    const auto kappa = g.block_dims.size();
    for (std::size_t e = 0; e < g.data.size(); ++e) {
        double w = g.data[e];
        for (std::size_t c = 0; c < kappa; ++c) {
            w *= f[c][g.coord[c][e]];
        }
        s += w;
    }
    return s;
}

Vector unit_vector(std::size_t dim)
{
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v[0] = 1.0;
    return v;
}

void normalize_factors(const Grouped& g, BlockFactors& f)
{
    if (f.size() != g.block_dims.size()) {
        throw ArgumentError("factor count does not match the number of blocks");
    }
    for (std::size_t b = 0; b < f.size(); ++b) {
        if (static_cast<std::size_t>(f[b].size()) != g.block_dims[b]) {
            throw ArgumentError("factor length does not match its block dimension");
        }
        const double nb = f[b].norm();
        f[b] = nb > 0.0 ? Vector(f[b] / nb) : unit_vector(g.block_dims[b]);
    }
}

NormCandidate run_als(const Grouped& g, BlockFactors f, double tol, int max_iterations)
{
    normalize_factors(g, f);
    NormCandidate c;
    c.converged = false;
    double prev = -1.0;
    double value = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t b = 0; b < f.size(); ++b) {
            Vector v = contract(g, f, b);
            const double nv = v.norm();
            if (nv > 0.0) {
                f[b] = v / nv;
            }
            value = nv;
        }
        c.iterations = it;
        if (value - prev <= tol * value) {
            c.converged = true;
            break;
        }
        prev = value;
    }
    c.value = value;
    c.factors = std::move(f);
    return c;
}

BlockFactors random_factors(const Grouped& g, std::uint64_t seed)
{
    BlockFactors f;
    for (std::size_t b = 0; b < g.block_dims.size(); ++b) {
        CounterRng rng(seed, b);
        Vector v(static_cast<Eigen::Index>(g.block_dims[b]));
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            v[j] = rng.normal(static_cast<std::uint64_t>(j));
        }
        f.push_back(std::move(v));
    }
    return f;
}

// Unit vector in R^dim with x_dim >= 0 from dim - 1 angles in [0, pi].
void spherical(const double* angles, std::size_t dim, double* out)
{
    double s = 1.0;
    for (std::size_t j = 0; j + 1 < dim; ++j) {
        out[j] = s * std::cos(angles[j]);
        s *= std::sin(angles[j]);
    }
    out[dim - 1] = s;
}

NormEstimate finish(std::vector<NormCandidate> cands, NormMethod method)
{
    NormEstimate est;
    est.method = method;
    est.certified_lower_bound = true;
    est.restarts_used = static_cast<int>(cands.size());
    std::size_t best = 0;
    int unconverged = 0;
    for (std::size_t r = 0; r < cands.size(); ++r) {
        if (cands[r].value > cands[best].value) {
            best = r;
        }
        if (!cands[r].converged) {
            ++unconverged;
        }
    }
    est.value = cands[best].value;
    est.factors = cands[best].factors;
    est.converged = cands[best].converged;
    if (unconverged > 0) {
        est.warning = std::to_string(unconverged) + " of " + std::to_string(cands.size()) +
                      " restarts reached the iteration cap before converging";
    }
    est.candidates = std::move(cands);
    return est;
}

NormEstimate als_norm(const Grouped& g, const NormOptions& opts)
{
    if (opts.restarts < 0 || opts.max_iterations < 1 || !(opts.tolerance >= 0.0)) {
        throw ArgumentError("invalid ALS options");
    }
    const auto random_runs = static_cast<std::size_t>(opts.restarts);
    const std::size_t total = random_runs + opts.warm_starts.size();
    if (total == 0) {
        throw ArgumentError("ALS needs at least one restart or warm start");
    }
    std::vector<NormCandidate> cands(total);
    parallel_for(total, 1, opts.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            BlockFactors start =
                r < random_runs ? random_factors(g, derive_seed(opts.seed, r)) : opts.warm_starts[r - random_runs];
            cands[r] = run_als(g, std::move(start), opts.tolerance, opts.max_iterations);
        }
    });
    return finish(std::move(cands), NormMethod::als);
}

NormEstimate brute_force_norm(const Grouped& g, const NormOptions& opts)
{
    const auto kappa = g.block_dims.size();
    for (auto dim : g.block_dims) {
        if (dim > 16) {
            throw ArgumentError("brute force needs every block dimension <= 16");
        }
    }
    // Angles for blocks 0..kappa-2; the last block is solved in closed form.
    std::size_t angle_count = 0;
    for (std::size_t b = 0; b + 1 < kappa; ++b) {
        angle_count += g.block_dims[b] - 1;
    }
    const std::size_t work_per_point = std::max<std::size_t>(1, g.data.size() / 16);
    const double budget = std::max(256.0, static_cast<double>(opts.grid_budget) / static_cast<double>(work_per_point));
    // A full grid needs at least 2^angle_count points; beyond the budget the
    // angles are drawn at random instead.
    const bool sampled = static_cast<double>(angle_count) * std::log(2.0) > std::log(budget);
    std::size_t steps = 1;
    std::size_t points = 1;
    if (sampled) {
        points = static_cast<std::size_t>(budget);
    } else if (angle_count > 0) {
        steps = static_cast<std::size_t>(std::floor(std::pow(budget, 1.0 / static_cast<double>(angle_count)) + 1e-9));
        steps = std::max<std::size_t>(steps, 2);
        for (std::size_t a = 0; a < angle_count; ++a) {
            points *= steps;
        }
    }
    const CounterRng rng(opts.seed, 0x6772696eull);

    BlockFactors f;
    for (auto dim : g.block_dims) {
        f.push_back(unit_vector(dim));
    }
    BlockFactors best = f;
    double best_value = -1.0;
    std::vector<double> angles(angle_count);
    for (std::size_t pt = 0; pt < points; ++pt) {
        std::size_t code = pt;
        for (std::size_t a = 0; a < angle_count; ++a) {
            if (sampled) {
                angles[a] = std::numbers::pi * rng.uniform(pt * angle_count + a);
                continue;
            }
            const auto j = code % steps;
            code /= steps;
            angles[a] = steps > 1 ? std::numbers::pi * static_cast<double>(j) / static_cast<double>(steps - 1) : 0.0;
        }
        std::size_t offset = 0;
        for (std::size_t b = 0; b + 1 < kappa; ++b) {
            spherical(angles.data() + offset, g.block_dims[b], f[b].data());
            offset += g.block_dims[b] - 1;
        }
        Vector v = contract(g, f, kappa - 1);
        const double nv = v.norm();
        if (nv > best_value) {
            best_value = nv;
            if (nv > 0.0) {
                f[kappa - 1] = v / nv;
            }
            best = f;
        }
    }
    auto polished = run_als(g, best, opts.tolerance, opts.max_iterations);
    if (polished.value < best_value) {
        polished.value = best_value;
        polished.factors = best;
    }
    std::vector<NormCandidate> cands{std::move(polished)};
    return finish(std::move(cands), NormMethod::brute_force);
}

NormEstimate zero_norm(const Grouped& g)
{
    NormEstimate est;
    const auto kappa = g.block_dims.size();
    est.method = kappa == 1 ? NormMethod::frobenius_exact
                 : kappa == 2 ? NormMethod::spectral_exact
                              : NormMethod::als;
    est.certified_lower_bound = est.method == NormMethod::als;
    for (auto dim : g.block_dims) {
        est.factors.push_back(unit_vector(dim));
    }
    est.candidates.push_back(NormCandidate{0.0, est.factors, true, 0});
    return est;
}

}  // namespace

std::string to_string(NormMethod m)
{
    switch (m) {
    case NormMethod::frobenius_exact:
        return "frobenius-exact";
    case NormMethod::spectral_exact:
        return "spectral-exact";
    case NormMethod::als:
        return "als";
    case NormMethod::brute_force:
        return "brute-force";
    }
    return "unknown";
}

std::size_t block_dimension(const TensorArray& B, const AxisSet& block)
{
    std::size_t n = 1;
    for (int l : block) {
        n *= B.extent(l);
    }
    return n;
}

Matrix matricize(const TensorArray& B, const AxisSet& row_axes, const AxisSet& col_axes)
{
    const auto rows = make_axis_set(row_axes);
    const auto cols = make_axis_set(col_axes);
    if (rows.empty() || cols.empty() || !axis_intersection(rows, cols).empty() || axis_union(rows, cols) != B.labels()) {
        throw AxisError("matricize: row and column axes must partition the array labels");
    }
    const auto g = group(B, {rows, cols});
    Matrix M = Matrix::Zero(static_cast<Eigen::Index>(g.block_dims[0]), static_cast<Eigen::Index>(g.block_dims[1]));
    for (std::size_t e = 0; e < B.size(); ++e) {
        M(g.coord[0][e], g.coord[1][e]) = B[e];
    }
    return M;
}

NormEstimate tensor_norm(const TensorArray& B, const Partition& P, const NormOptions& opts)
{
    check_partition_of(B, P);
    const auto g = group(B, P.blocks);
    const auto kappa = P.size();
    if (std::all_of(B.data().begin(), B.data().end(), [](double x) { return x == 0.0; })) {
        return zero_norm(g);
    }
    if (opts.force_brute_force) {
        return brute_force_norm(g, opts);
    }
    if (opts.force_als || kappa >= 3) {
        return als_norm(g, opts);
    }
    NormEstimate est;
    NormCandidate cand;
    if (kappa == 1) {
        est.method = NormMethod::frobenius_exact;
        cand.value = frobenius(B);
        Vector v(static_cast<Eigen::Index>(B.size()));
        for (std::size_t e = 0; e < B.size(); ++e) {
            v[g.coord[0][e]] = B[e];
        }
        cand.factors.push_back(v / cand.value);
    } else {
        est.method = NormMethod::spectral_exact;
        Matrix M = Matrix::Zero(static_cast<Eigen::Index>(g.block_dims[0]), static_cast<Eigen::Index>(g.block_dims[1]));
        for (std::size_t e = 0; e < B.size(); ++e) {
            M(g.coord[0][e], g.coord[1][e]) = B[e];
        }
        Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        cand.value = svd.singularValues()[0];
        cand.factors.push_back(svd.matrixU().col(0));
        cand.factors.push_back(svd.matrixV().col(0));
    }
    est.value = cand.value;
    est.factors = cand.factors;
    est.restarts_used = 1;
    est.candidates.push_back(std::move(cand));
    return est;
}

double multilinear_form(const TensorArray& B, const Partition& P, const BlockFactors& factors)
{
    check_partition_of(B, P);
    const auto g = group(B, P.blocks);
    if (factors.size() != P.size()) {
        throw ArgumentError("multilinear_form: one factor per block required");
    }
    for (std::size_t b = 0; b < factors.size(); ++b) {
        if (static_cast<std::size_t>(factors[b].size()) != g.block_dims[b]) {
            throw ArgumentError("multilinear_form: factor length does not match its block dimension");
        }
    }
    return evaluate(g, factors);
}

Vector contract_except(const TensorArray& B, const Partition& P, const BlockFactors& factors, std::size_t free_block)
{
    check_partition_of(B, P);
    if (free_block >= P.size() || factors.size() != P.size()) {
        throw ArgumentError("contract_except: bad block position or factor count");
    }
    return contract(group(B, P.blocks), factors, free_block);
}

TensorArray diagonal_restriction(const TensorArray& A2d, const AxisSet& I)
{
    const auto d = static_cast<int>(half_order(A2d));
    const auto axes = make_axis_set(I);
    if (!axis_subset(axes, axis_range(1, d))) {
        throw AxisError("diagonal_restriction: I must be a subset of [d]");
    }
    std::vector<double> data(A2d.data().begin(), A2d.data().end());
    Odometer odo(A2d.shape());
    for (std::size_t e = 0; e < data.size(); ++e, odo.advance()) {
        for (int l : axes) {
            const auto p = static_cast<std::size_t>(l - 1);
            if (odo.index()[p] != odo.index()[p + static_cast<std::size_t>(d)]) {
                data[e] = 0.0;
                break;
            }
        }
    }
    return TensorArray(A2d.labels(), A2d.shape(), std::move(data));
}

MergeSplitReport verify_merge_split(const TensorArray& B, const Partition& split, std::size_t a, std::size_t b,
                                    const NormOptions& opts)
{
    check_partition_of(B, split);
    MergeSplitReport rep;
    rep.split = split;
    rep.merged = merge_blocks(split, a, b);
    const auto gs = group(B, split.blocks);
    const auto gm = group(B, rep.merged.blocks);
    const auto merged_axes = axis_union(split.blocks[a], split.blocks[b]);
    std::size_t mpos = 0;
    std::vector<std::size_t> split_pos_of(rep.merged.size());
    for (std::size_t c = 0; c < rep.merged.size(); ++c) {
        if (rep.merged.blocks[c] == merged_axes) {
            mpos = c;
            continue;
        }
        split_pos_of[c] = static_cast<std::size_t>(
            std::find(split.blocks.begin(), split.blocks.end(), rep.merged.blocks[c]) - split.blocks.begin());
    }
    const double scale = std::max(frobenius(B), std::numeric_limits<double>::min());

    auto lift = [&](const BlockFactors& f) {
        BlockFactors m(rep.merged.size());
        for (std::size_t c = 0; c < rep.merged.size(); ++c) {
            if (c != mpos) {
                m[c] = f[split_pos_of[c]];
            }
        }
        m[mpos] = Vector::Zero(static_cast<Eigen::Index>(gm.block_dims[mpos]));
        for (std::size_t e = 0; e < B.size(); ++e) {
            m[mpos][gm.coord[mpos][e]] = f[a][gs.coord[a][e]] * f[b][gs.coord[b][e]];
        }
        return m;
    };

    rep.split_norm = tensor_norm(B, split, opts);
    // Split feasible point -> merged feasible point with the same objective.
    for (const auto& cand : rep.split_norm.candidates) {
        const double s = evaluate(gs, cand.factors);
        const double m = evaluate(gm, lift(cand.factors));
        rep.lift_error = std::max(rep.lift_error, std::abs(m - s) / scale);
    }
    NormOptions merged_opts = opts;
    merged_opts.warm_starts.clear();
    merged_opts.warm_starts.push_back(lift(rep.split_norm.factors));
    rep.merged_norm = tensor_norm(B, rep.merged, merged_opts);

    // Merged feasible point -> matrix Atilde over (block a) x (block b) with
    // ||Atilde||_F >= merged objective and sigma_max(Atilde) feasible for split.
    const auto& mf = rep.merged_norm.factors;
    Matrix At = Matrix::Zero(static_cast<Eigen::Index>(gs.block_dims[a]), static_cast<Eigen::Index>(gs.block_dims[b]));
    for (std::size_t e = 0; e < B.size(); ++e) {
        double w = B[e];
        for (std::size_t c = 0; c < rep.merged.size(); ++c) {
            if (c != mpos) {
                w *= mf[c][gm.coord[c][e]];
            }
        }
        At(gs.coord[a][e], gs.coord[b][e]) += w;
    }
    const double at_frob = At.norm();
    double sigma = 0.0;
    if (at_frob > 0.0) {
        Eigen::BDCSVD<Matrix> svd(At, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sigma = svd.singularValues()[0];
        BlockFactors sf(split.size());
        for (std::size_t c = 0; c < rep.merged.size(); ++c) {
            if (c != mpos) {
                sf[split_pos_of[c]] = mf[c];
            }
        }
        sf[a] = svd.matrixU().col(0);
        sf[b] = svd.matrixV().col(0);
        rep.lift_error = std::max(rep.lift_error, std::abs(evaluate(gs, sf) - sigma) / scale);
    }
    const double merged_lb = std::max(rep.merged_norm.value, at_frob);
    const double split_lb = std::max(rep.split_norm.value, sigma);
    rep.sqrt_min_factor =
        std::sqrt(static_cast<double>(std::min(gs.block_dims[a], gs.block_dims[b])));

    constexpr double rel_slack = 1e-6;
    const double abs_slack = 1e-12 * scale;
    rep.lower = check_leq("split <= merged", rep.split_norm.value, merged_lb, rep.merged_norm.exact(), rel_slack,
                          abs_slack);
    rep.upper = check_leq("merged <= sqrt(min) * split", merged_lb, rep.sqrt_min_factor * split_lb,
                          rep.split_norm.exact(), rel_slack, abs_slack);
    rep.verdict = combine(rep.lower.verdict, rep.upper.verdict);
    if (rep.lift_error > 1e-9) {
        rep.verdict = Verdict::fail;
    }
    return rep;
}

DiagonalRestrictionReport verify_diagonal_restriction(const TensorArray& A2d, const AxisSet& I, const Partition& P,
                                                      const NormOptions& opts)
{
    DiagonalRestrictionReport rep;
    const auto restricted = diagonal_restriction(A2d, I);
    rep.restricted = tensor_norm(restricted, P, opts);
    NormOptions full_opts = opts;
    full_opts.warm_starts.push_back(rep.restricted.factors);
    rep.full = tensor_norm(A2d, P, full_opts);
    const double scale = frobenius(A2d);
    rep.check = check_leq("restricted <= full", rep.restricted.value, rep.full.value, rep.full.exact(), 1e-6,
                          1e-12 * scale);
    rep.verdict = rep.check.verdict;
    return rep;
}

}  // namespace kronchaos
