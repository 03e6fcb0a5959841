#include "kronchaos/suites.hpp"

#include "kronchaos/errors.hpp"
#include "kronchaos/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kronchaos {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::size_t sample_chunk = 2048;

// Runs stat(s, out) for every sample s and collects out[b] into batch b.
template <typename Stat>
std::vector<SampleBatch> collect(std::size_t samples, std::size_t count, const MonteCarloOptions& mc, Stat&& stat)
{
    std::vector<SampleBatch> batches(count);
    for (std::size_t b = 0; b < count; ++b) {
        batches[b].seed = derive_seed(mc.seed, 1000 + b);
        batches[b].values.resize(samples);
    }
    parallel_for(samples, sample_chunk, mc.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> out(count);
        for (std::size_t s = begin; s < end; ++s) {
            stat(s, out);
            for (std::size_t b = 0; b < count; ++b) {
                batches[b].values[s] = out[b];
            }
        }
    });
    return batches;
}

void check_p_grid(const std::vector<double>& p_grid, double lo, double hi)
{
    if (p_grid.empty()) {
        throw ArgumentError("p grid is empty");
    }
    for (double p : p_grid) {
        if (!(p >= lo && p <= hi)) {
            std::ostringstream os;
            os << "p = " << p << " outside [" << lo << ", " << hi << "]";
            throw ArgumentError(os.str());
        }
    }
}

void check_square(const Matrix& A, const Dims& dims)
{
    const auto N = static_cast<Eigen::Index>(dims.total());
    if (A.rows() != N || A.cols() != N) {
        throw ShapeError("matrix must be N x N with N = product of dims");
    }
}

std::string band_text(double lo, double hi)
{
    std::ostringstream os;
    os.precision(6);
    os << "[" << lo << ", " << hi << "]";
    return os.str();
}

double spectral(const Matrix& A)
{
    Eigen::BDCSVD<Matrix> svd(A);
    return svd.singularValues()[0];
}

std::uint64_t pick(const CounterRng& rng, std::uint64_t index, std::uint64_t range)
{
    const auto b = rng.block(index);
    const std::uint64_t x = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    return static_cast<std::uint64_t>((static_cast<u128>(x) * range) >> 64);
}

std::vector<Vector> normal_factors(const std::vector<std::size_t>& sizes, const CounterRng& rng, std::uint64_t base)
{
    std::vector<Vector> out;
    std::uint64_t k = base;
    for (auto n : sizes) {
        Vector x(static_cast<Eigen::Index>(n));
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            x[j] = rng.normal(k++);
        }
        out.push_back(std::move(x));
    }
    return out;
}

TensorArray normal_array(AxisSet labels, std::vector<std::size_t> shape, const CounterRng& rng, std::uint64_t base)
{
    std::size_t total = 1;
    for (auto n : shape) {
        total *= n;
    }
    std::vector<double> data(total);
    for (std::size_t e = 0; e < total; ++e) {
        data[e] = rng.normal(base + e);
    }
    return TensorArray(std::move(labels), std::move(shape), std::move(data));
}

std::vector<std::size_t> random_sizes(const CounterRng& rng, std::uint64_t base, std::size_t d, std::size_t max_n)
{
    std::vector<std::size_t> sizes(d);
    for (std::size_t l = 0; l < d; ++l) {
        sizes[l] = 1 + pick(rng, base + l, max_n);
    }
    return sizes;
}

// x^T A x computed on the matrix (independent of the array layout).
double quadratic(const TensorArray& A2d, const std::vector<Vector>& x)
{
    const Vector X = kronecker_vector(x);
    return X.dot(to_matrix(A2d) * X);
}

void finish_identity(IdentityRow& row)
{
    row.verdict = row.max_rel_error <= row.tolerance ? Verdict::pass : Verdict::fail;
}

void tally(NormSuiteRow& row, Verdict v)
{
    ++row.instances;
    switch (v) {
    case Verdict::pass:
        ++row.passed;
        break;
    case Verdict::inconclusive_pass:
        ++row.inconclusive;
        break;
    case Verdict::fail:
        ++row.failed;
        break;
    case Verdict::skipped:
        break;
    }
    row.verdict = combine(row.verdict, v);
}

}  // namespace

double relative_gap(double lhs, double rhs, double scale)
{
    const double denom = std::max({std::abs(lhs), std::abs(rhs), std::abs(scale)});
    return denom > 0.0 ? std::abs(lhs - rhs) / denom : 0.0;
}

// ------------------------------------------------------------ decoupling

DecouplingReport verify_decoupling(const Matrix& A, const Dims& dims, const DistributionSpec& dist,
                                   const std::vector<double>& p_grid, const MonteCarloOptions& mc)
{
    check_square(A, dims);
    check_p_grid(p_grid, 1.0, 16.0);
    if (mc.samples < 1000) {
        throw ArgumentError("decoupling suite needs at least 1000 samples");
    }
    const auto A2d = rearrange_matrix(A, dims);
    const auto d = dims.order();
    const auto full = axis_range(1, static_cast<int>(d));
    DecouplingReport rep;
    for (const auto& I : subsets(full)) {
        for (const auto& J : subsets(I)) {
            if (axis_difference(I, J) == full) {
                continue;
            }
            rep.terms.push_back({I, J, std::pow(4.0, static_cast<double>(d - I.size())), {}});
        }
    }
    const auto k = rep.terms.size();
    auto batches = collect(mc.samples, k + 1, mc, [&](std::size_t s, std::vector<double>& out) {
        const auto x = sample_factors(dims, dist, mc.seed, s, stream_primary);
        const auto xbar = sample_factors(dims, dist, mc.seed, s, stream_copy);
        out[0] = chaos_statistic(A, x);
        for (std::size_t t = 0; t < k; ++t) {
            out[t + 1] = semi_decoupled_term(A2d, rep.terms[t].I, rep.terms[t].J, x, xbar);
        }
    });
    std::ostringstream detail;
    for (double p : p_grid) {
        DecouplingRow row;
        row.p = p;
        row.lhs = estimate_lp(batches[0], p);
        for (std::size_t t = 0; t < k; ++t) {
            const auto m = estimate_lp(batches[t + 1], p);
            rep.terms[t].moments.push_back(m);
            row.rhs += rep.terms[t].weight * m.estimate;
            row.rhs_low += rep.terms[t].weight * m.ci_low;
            row.rhs_high += rep.terms[t].weight * m.ci_high;
        }
        row.verdict = band_verdict(row.lhs.ci_low, row.lhs.ci_high, row.rhs_low, row.rhs_high);
        if (row.verdict == Verdict::fail) {
            detail << "p=" << p << ": lhs band " << band_text(row.lhs.ci_low, row.lhs.ci_high)
                   << " lies above rhs band " << band_text(row.rhs_low, row.rhs_high) << "; ";
        } else if (row.verdict == Verdict::inconclusive_pass) {
            detail << "p=" << p << ": lhs band " << band_text(row.lhs.ci_low, row.lhs.ci_high)
                   << " overlaps rhs band " << band_text(row.rhs_low, row.rhs_high) << "; ";
        }
        rep.verdict = combine(rep.verdict, row.verdict);
        rep.rows.push_back(row);
    }
    rep.detail = detail.str();
    return rep;
}

// ------------------------------------------------------------ moment sandwich

MainUpperReport verify_main_upper(const Matrix& A, const Dims& dims, const DistributionSpec& dist,
                                  const std::vector<double>& p_grid, const MonteCarloOptions& mc, double ceiling,
                                  const NormOptions& norm_opts)
{
    check_square(A, dims);
    check_p_grid(p_grid, 2.0, 16.0);
    MainUpperReport rep;
    rep.L = dist.effective_L();
    rep.ceiling = ceiling;
    const auto table = reduced_norm_table(rearrange_matrix(A, dims), norm_opts);
    rep.mp_has_lower_bounds = table.has_lower_bounds();
    rep.warnings = table.warnings();
    auto batches = collect(mc.samples, 1, mc, [&](std::size_t s, std::vector<double>& out) {
        out[0] = chaos_statistic(A, sample_factors(dims, dist, mc.seed, s));
    });
    std::ostringstream detail;
    for (double p : p_grid) {
        RatioRow row;
        row.p = p;
        row.seed = mc.seed;
        row.empirical = estimate_lp(batches[0], p);
        row.mp = mp_main_from(table, p, rep.L);
        if (row.mp > 0.0) {
            row.ratio = row.empirical.estimate / row.mp;
            row.ratio_low = row.empirical.ci_low / row.mp;
            row.ratio_high = row.empirical.ci_high / row.mp;
        }
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        Verdict v = Verdict::pass;
        if (row.ratio_low > ceiling) {
            v = rep.mp_has_lower_bounds ? Verdict::inconclusive_pass : Verdict::fail;
            detail << "p=" << p << ": ratio band " << band_text(row.ratio_low, row.ratio_high) << " above ceiling "
                   << ceiling << "; ";
        } else if (row.ratio_high > ceiling) {
            v = Verdict::inconclusive_pass;
            detail << "p=" << p << ": ratio band " << band_text(row.ratio_low, row.ratio_high)
                   << " straddles ceiling " << ceiling << "; ";
        }
        rep.verdict = combine(rep.verdict, v);
        rep.rows.push_back(row);
    }
    if (A.isZero(0.0)) {
        detail << "zero matrix: both sides vanish, ratios set to 0";
    }
    rep.detail = detail.str();
    return rep;
}

MainLowerReport verify_main_lower(const Matrix& A, const Dims& dims, const std::vector<double>& p_grid,
                                  const MonteCarloOptions& mc, int replicates, const NormOptions& norm_opts)
{
    check_square(A, dims);
    check_p_grid(p_grid, 2.0, 16.0);
    if (replicates < 1) {
        throw ArgumentError("need at least one replicate");
    }
    MainLowerReport rep;
    for (int r = 0; r < replicates; ++r) {
        rep.seeds.push_back(derive_seed(mc.seed, 500 + static_cast<std::uint64_t>(r)));
    }
    if (A.isZero(0.0)) {
        rep.verdict = Verdict::skipped;
        rep.stable = false;
        rep.detail = "degenerate input: zero matrix";
        return rep;
    }
    const auto A2d = rearrange_matrix(A, dims);
    if (!check_symmetry(A2d)) {
        throw PreconditionError("lower moment bound needs an array satisfying the symmetry condition; symmetrize first");
    }
    const auto gauss = DistributionSpec::make(Family::gaussian);
    const auto table = reduced_norm_table(A2d, norm_opts);
    rep.mp_has_lower_bounds = table.has_lower_bounds();
    rep.warnings = table.warnings();
    rep.min_ratio = std::numeric_limits<double>::infinity();
    std::ostringstream detail;
    std::vector<std::vector<double>> by_p(p_grid.size());
    for (auto seed : rep.seeds) {
        MonteCarloOptions rmc = mc;
        rmc.seed = seed;
        auto batches = collect(mc.samples, 1, rmc, [&](std::size_t s, std::vector<double>& out) {
            out[0] = chaos_statistic(A, sample_factors(dims, gauss, seed, s));
        });
        for (std::size_t k = 0; k < p_grid.size(); ++k) {
            RatioRow row;
            row.p = p_grid[k];
            row.seed = seed;
            row.empirical = estimate_lp(batches[0], row.p);
            row.mp = mp_main_from(table, row.p, gauss.effective_L());
            row.ratio = row.empirical.estimate / row.mp;
            row.ratio_low = row.empirical.ci_low / row.mp;
            row.ratio_high = row.empirical.ci_high / row.mp;
            rep.min_ratio = std::min(rep.min_ratio, row.ratio);
            rep.max_ratio = std::max(rep.max_ratio, row.ratio);
            if (row.ratio_high <= 0.0) {
                rep.verdict = Verdict::fail;
                detail << "p=" << row.p << " seed=" << seed << ": empirical moment vanishes while m_p > 0; ";
            }
            by_p[k].push_back(row.ratio);
            rep.rows.push_back(row);
        }
    }
    for (std::size_t k = 0; k < p_grid.size(); ++k) {
        double mean = 0.0;
        for (double r : by_p[k]) {
            mean += r;
        }
        mean /= static_cast<double>(by_p[k].size());
        double spread = 0.0;
        for (double r : by_p[k]) {
            spread = std::max(spread, std::abs(r - mean) / mean);
        }
        rep.spread.push_back(spread);
        if (spread > rep.stability_tolerance) {
            rep.stable = false;
            detail << "p=" << p_grid[k] << ": ratios vary by " << spread << " across seeds; ";
        }
    }
    if (!rep.stable) {
        rep.verdict = combine(rep.verdict, Verdict::inconclusive_pass);
    }
    rep.detail = detail.str();
    return rep;
}

// ------------------------------------------------------------ tails

AxTailReport verify_ax_tail(const Matrix& A, const Dims& dims, const DistributionSpec& dist,
                            const std::vector<double>& t_grid, const MonteCarloOptions& mc, double knob_C)
{
    if (!dims.all_equal()) {
        throw ArgumentError("tail suite needs equal dims along every axis");
    }
    if (static_cast<std::size_t>(A.cols()) != dims.total()) {
        throw ShapeError("matrix must have N = product of dims columns");
    }
    if (mc.samples < 10000) {
        throw ArgumentError("tail suite needs at least 10000 samples");
    }
    if (t_grid.empty()) {
        throw ArgumentError("t grid is empty");
    }
    AxTailReport rep;
    rep.knob_C = knob_C;
    if (A.isZero(0.0)) {
        rep.verdict = Verdict::skipped;
        rep.detail = "degenerate input: zero matrix";
        return rep;
    }
    const auto n = dims.sizes()[0];
    const auto d = dims.order();
    auto batches = collect(mc.samples, 1, mc, [&](std::size_t s, std::vector<double>& out) {
        out[0] = norm_statistic(A, sample_factors(dims, dist, mc.seed, s));
    });
    auto ts = t_grid;
    std::sort(ts.begin(), ts.end());
    rep.fitted_C = std::numeric_limits<double>::infinity();
    std::vector<TailFrequency> freq;
    for (double t : ts) {
        freq.push_back(estimate_tail(batches[0], t));
        const double u = freq.back().ci_high;
        for (const auto& [r, x] : tail_exponents(A, n, d, t)) {
            if (x > 0.0) {
                rep.fitted_C = std::min(rep.fitted_C, (2.0 - std::log(u)) / x);
            }
        }
    }
    std::ostringstream detail;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        TailRow row;
        row.empirical = freq[k];
        row.bound_fitted = std::isfinite(rep.fitted_C) ? tail_bound_ax(A, n, d, ts[k], rep.fitted_C).value : 1.0;
        row.bound_knob = tail_bound_ax(A, n, d, ts[k], knob_C).value;
        if (row.empirical.frequency > row.bound_fitted) {
            rep.verdict = Verdict::fail;
            detail << "t=" << ts[k] << ": frequency above fitted bound; ";
        }
        if (k > 0 && row.empirical.frequency > rep.rows.back().empirical.frequency) {
            rep.monotone = false;
        }
        rep.rows.push_back(row);
    }
    if (!std::isfinite(rep.fitted_C)) {
        detail << "no t constrains the constant";
    }
    rep.detail = detail.str();
    return rep;
}

HansonWrightReport verify_hanson_wright(const Matrix& A, const DistributionSpec& dist,
                                        const std::vector<double>& t_grid, const MonteCarloOptions& mc,
                                        double knob_c)
{
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw ShapeError("Hanson-Wright suite needs a square matrix");
    }
    if (t_grid.empty()) {
        throw ArgumentError("t grid is empty");
    }
    HansonWrightReport rep;
    rep.K = dist.psi2;
    rep.knob_c = knob_c;
    if (A.isZero(0.0)) {
        rep.verdict = Verdict::skipped;
        rep.detail = "degenerate input: zero matrix";
        return rep;
    }
    const Dims dims({static_cast<std::size_t>(A.rows())});
    const double fro = A.norm();
    const double spec = spectral(A);
    const double K2 = rep.K * rep.K;
    auto exponent = [&](double t) { return std::min(t * t / (K2 * K2 * fro * fro), t / (K2 * spec)); };
    auto batches = collect(mc.samples, 1, mc, [&](std::size_t s, std::vector<double>& out) {
        out[0] = chaos_statistic(A, sample_factors(dims, dist, mc.seed, s));
    });
    auto ts = t_grid;
    std::sort(ts.begin(), ts.end());
    rep.fitted_c = std::numeric_limits<double>::infinity();
    std::vector<TailFrequency> freq;
    for (double t : ts) {
        freq.push_back(estimate_tail(batches[0], t));
        const double m = exponent(t);
        if (m > 0.0) {
            rep.fitted_c = std::min(rep.fitted_c, std::log(2.0 / freq.back().ci_high) / m);
        }
    }
    std::ostringstream detail;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        TailRow row;
        row.empirical = freq[k];
        row.bound_fitted =
            std::isfinite(rep.fitted_c) ? std::min(1.0, 2.0 * std::exp(-rep.fitted_c * exponent(ts[k]))) : 1.0;
        row.bound_knob = std::min(1.0, 2.0 * std::exp(-knob_c * exponent(ts[k])));
        if (row.empirical.frequency > row.bound_fitted) {
            rep.verdict = Verdict::fail;
            detail << "t=" << ts[k] << ": frequency above fitted envelope; ";
        }
        rep.rows.push_back(row);
    }
    if (!std::isfinite(rep.fitted_c)) {
        detail << "no t constrains the constant";
    }
    rep.detail = detail.str();
    return rep;
}

// ------------------------------------------------------------ gaussian decoupling

GaussianDecouplingReport verify_gaussian_decoupling(const Vector& a, const std::vector<double>& p_grid,
                                                    const MonteCarloOptions& mc, double exact_tolerance)
{
    check_p_grid(p_grid, 1.0, 16.0);
    if (a.size() == 0) {
        throw ArgumentError("coefficient vector is empty");
    }
    GaussianDecouplingReport rep;
    rep.exact_tolerance = exact_tolerance;
    const auto n = static_cast<std::uint64_t>(a.size());
    const CounterRng g(mc.seed, stream_primary);
    const CounterRng gbar(mc.seed, stream_copy);
    auto batches = collect(mc.samples, 2, mc, [&](std::size_t s, std::vector<double>& out) {
        double coupled = 0.0;
        double decoupled = 0.0;
        for (std::uint64_t k = 0; k < n; ++k) {
            const double x = g.normal(s * n + k);
            const double y = gbar.normal(s * n + k);
            coupled += a[static_cast<Eigen::Index>(k)] * (x * x - 1.0);
            decoupled += a[static_cast<Eigen::Index>(k)] * x * y;
        }
        out[0] = coupled;
        out[1] = decoupled;
    });
    const double norm_a = a.norm();
    std::ostringstream detail;
    for (double p : p_grid) {
        GaussianDecouplingRow row;
        row.p = p;
        row.lhs = estimate_lp(batches[0], p);
        row.rhs = estimate_lp(batches[1], p);
        row.rhs.estimate *= 2.0;
        row.rhs.ci_low *= 2.0;
        row.rhs.ci_high *= 2.0;
        row.verdict = band_verdict(row.lhs.ci_low, row.lhs.ci_high, row.rhs.ci_low, row.rhs.ci_high);
        if (p == 2.0) {
            row.has_exact = true;
            row.exact_lhs = std::sqrt(2.0) * norm_a;
            row.exact_rhs = 2.0 * norm_a;
            row.lhs_rel_error = relative_gap(row.lhs.estimate, row.exact_lhs, 0.0);
            row.rhs_rel_error = relative_gap(row.rhs.estimate, row.exact_rhs, 0.0);
            if (row.lhs_rel_error > exact_tolerance || row.rhs_rel_error > exact_tolerance) {
                row.verdict = Verdict::fail;
                detail << "p=2: estimates deviate from the exact values by " << row.lhs_rel_error << " and "
                       << row.rhs_rel_error << "; ";
            }
        }
        if (row.verdict == Verdict::fail && !row.has_exact) {
            detail << "p=" << p << ": lhs band above rhs band; ";
        }
        rep.verdict = combine(rep.verdict, row.verdict);
        rep.rows.push_back(row);
    }
    rep.detail = detail.str();
    return rep;
}

// ------------------------------------------------------------ identities

IdentitiesReport run_identities(std::uint64_t seed, int instances)
{
    if (instances < 1) {
        throw ArgumentError("need at least one instance");
    }
    IdentitiesReport rep;
    IdentityRow rearr{"rearrangement", 0, 0.0, 1e-10, Verdict::pass};
    IdentityRow inverse{"inverse-rearrangement", 0, 0.0, 1e-10, Verdict::pass};
    IdentityRow sym{"symmetrize-chaos", 0, 0.0, 1e-10, Verdict::pass};
    IdentityRow backbone{"decoupling-backbone", 0, 0.0, 1e-10, Verdict::pass};
    IdentityRow signs{"signed-subset-sum", 0, 0.0, 0.0, Verdict::pass};

    for (int inst = 0; inst < instances; ++inst) {
        const std::size_t d = 1 + static_cast<std::size_t>(inst % 3);
        const auto full = axis_range(1, static_cast<int>(d));

        {  // sum B prod x^2 against the partial sums B^(I)
            const CounterRng rng(derive_seed(seed, 10000 + static_cast<std::uint64_t>(inst)), 0);
            const auto sizes = random_sizes(rng, 0, d, 4);
            const auto B = normal_array(full, sizes, rng, 100);
            const auto x = normal_factors(sizes, rng, 50);
            double lhs = 0.0;
            double scale = 0.0;
            Odometer odo(B.shape());
            for (std::size_t e = 0; e < B.size(); ++e, odo.advance()) {
                double w = B[e];
                for (std::size_t l = 0; l < d; ++l) {
                    const double v = x[l][static_cast<Eigen::Index>(odo.index()[l])];
                    w *= v * v;
                }
                lhs += w;
                scale += std::abs(w);
            }
            double rhs = 0.0;
            for (const auto& I : subsets(full)) {
                const auto BI = sum_out_axes(B, I);
                Odometer o(BI.shape());
                for (std::size_t e = 0; e < BI.size(); ++e, o.advance()) {
                    double w = BI[e];
                    for (std::size_t k = 0; k < BI.order(); ++k) {
                        const auto l = static_cast<std::size_t>(BI.labels()[k] - 1);
                        const double v = x[l][static_cast<Eigen::Index>(o.index()[k])];
                        w *= v * v - 1.0;
                    }
                    rhs += w;
                    scale += std::abs(w);
                }
            }
            ++rearr.instances;
            rearr.max_rel_error = std::max(rearr.max_rel_error, relative_gap(lhs, rhs, scale));
        }

        {  // sum over I with mean-subtracted factors on I, traced on I^c
            const CounterRng rng(derive_seed(seed, 20000 + static_cast<std::uint64_t>(inst)), 0);
            const auto sizes = random_sizes(rng, 0, d, 4);
            const auto doubled = DoubledDims(Dims(sizes)).sizes();
            const auto A2d = normal_array(axis_range(1, static_cast<int>(2 * d)), doubled, rng, 100);
            const auto x = normal_factors(sizes, rng, 50);
            double lhs = 0.0;
            double scale = 0.0;
            for (const auto& I : subsets(full)) {
                Odometer odo(A2d.shape());
                for (std::size_t e = 0; e < A2d.size(); ++e, odo.advance()) {
                    const auto& idx = odo.index();
                    double w = A2d[e];
                    for (std::size_t l = 0; l < d && w != 0.0; ++l) {
                        const bool same = idx[l] == idx[l + d];
                        if (std::binary_search(I.begin(), I.end(), static_cast<int>(l + 1))) {
                            w *= x[l][static_cast<Eigen::Index>(idx[l])] * x[l][static_cast<Eigen::Index>(idx[l + d])] -
                                 (same ? 1.0 : 0.0);
                        } else if (!same) {
                            w = 0.0;
                        }
                    }
                    lhs += w;
                    scale += std::abs(w);
                }
            }
            const double rhs = quadratic(A2d, x);
            ++inverse.instances;
            inverse.max_rel_error = std::max(inverse.max_rel_error, relative_gap(lhs, rhs, scale));
        }

        {  // symmetrization keeps X^T A X
            const CounterRng rng(derive_seed(seed, 30000 + static_cast<std::uint64_t>(inst)), 0);
            const auto sizes = random_sizes(rng, 0, d, 4);
            const auto doubled = DoubledDims(Dims(sizes)).sizes();
            const auto A2d = normal_array(axis_range(1, static_cast<int>(2 * d)), doubled, rng, 100);
            const auto S = symmetrize(A2d);
            const auto x = normal_factors(sizes, rng, 50);
            const double lhs = quadratic(A2d, x);
            const double rhs = quadratic(S, x);
            double xx = 1.0;
            for (const auto& v : x) {
                xx *= v.squaredNorm();
            }
            double err = relative_gap(lhs, rhs, frobenius(A2d) * xx);
            if (!check_symmetry(S)) {
                err = std::numeric_limits<double>::infinity();
            }
            ++sym.instances;
            sym.max_rel_error = std::max(sym.max_rel_error, err);
        }

        {  // the (I, J) blocks with distinct pairs partition X^T A X - trace
            const CounterRng rng(derive_seed(seed, 40000 + static_cast<std::uint64_t>(inst)), 0);
            const auto sizes = random_sizes(rng, 0, d, 3);
            const auto doubled = DoubledDims(Dims(sizes)).sizes();
            const auto A2d = normal_array(axis_range(1, static_cast<int>(2 * d)), doubled, rng, 100);
            const auto x = normal_factors(sizes, rng, 50);
            double lhs = 0.0;
            double scale = 0.0;
            for (const auto& I : subsets(full)) {
                for (const auto& J : subsets(I)) {
                    if (axis_difference(I, J) == full) {
                        continue;
                    }
                    const double term = semi_decoupled_term(A2d, I, J, x, x, true);
                    lhs += term;
                    scale += std::abs(term);
                }
            }
            const double trace = expected_chaos(A2d);
            const double rhs = quadratic(A2d, x) - trace;
            scale += std::abs(trace);
            ++backbone.instances;
            backbone.max_rel_error = std::max(backbone.max_rel_error, relative_gap(lhs, rhs, scale));
        }

        {  // alternating subset sums
            const auto T = axis_range(1, inst % 13);
            const int expected = T.empty() ? 1 : 0;
            ++signs.instances;
            signs.max_rel_error = std::max(signs.max_rel_error,
                                           static_cast<double>(std::abs(signed_subset_sum(T) - expected)));
        }
    }
    for (auto* row : {&rearr, &inverse, &sym, &backbone, &signs}) {
        finish_identity(*row);
        rep.verdict = combine(rep.verdict, row->verdict);
        rep.rows.push_back(*row);
    }
    return rep;
}

// ------------------------------------------------------------ norms

NormsReport run_norm_suite(std::uint64_t seed, int instances, const NormOptions& norm_opts)
{
    if (instances < 1) {
        throw ArgumentError("need at least one instance");
    }
    NormsReport rep;
    NormSuiteRow spectral_row{"spectral-vs-eigen", 0, 0, 0, 0, 0.0, 1e-8, Verdict::pass};
    NormSuiteRow als_row{"als-vs-spectral", 0, 0, 0, 0, 0.0, 1e-6, Verdict::pass};
    NormSuiteRow merge_row{"merge-split", 0, 0, 0, 0, 0.0, 1e-6, Verdict::pass};
    NormSuiteRow diag_row{"diagonal-restriction", 0, 0, 0, 0, 0.0, 1e-6, Verdict::pass};
    NormSuiteRow lift_row{"lift", 0, 0, 0, 0, 0.0, 1e-6, Verdict::pass};
    NormSuiteRow bounds_row{"reduced-norm-bounds", 0, 0, 0, 0, 0.0, 1e-6, Verdict::pass};

    NormOptions als_opts = norm_opts;
    als_opts.force_als = true;

    for (int inst = 0; inst < instances; ++inst) {
        const auto u = static_cast<std::uint64_t>(inst);
        {  // kappa = 2: SVD route against sqrt(lambda_max(M^T M))
            const CounterRng rng(derive_seed(seed, 50000 + u), 0);
            const std::size_t k = 2 + pick(rng, 0, 3);
            const auto sizes = random_sizes(rng, 1, k, 4);
            const auto labels = axis_range(1, static_cast<int>(k));
            const auto B = normal_array(labels, sizes, rng, 100);
            // Nonempty proper subset of the labels for the rows.
            const std::uint64_t mask = 1 + pick(rng, 10, (std::uint64_t{1} << k) - 2);
            AxisSet rows;
            AxisSet cols;
            for (std::size_t l = 0; l < k; ++l) {
                ((mask >> l) & 1u ? rows : cols).push_back(static_cast<int>(l + 1));
            }
            const auto P = make_partition(labels, {rows, cols});
            const auto est = tensor_norm(B, P, norm_opts);
            const Matrix M = matricize(B, rows, cols);
            Eigen::SelfAdjointEigenSolver<Matrix> eig(M.transpose() * M, Eigen::EigenvaluesOnly);
            const double oracle = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
            const double err = relative_gap(est.value, oracle, 0.0);
            spectral_row.max_error = std::max(spectral_row.max_error, err);
            tally(spectral_row, err <= spectral_row.tolerance && est.exact() ? Verdict::pass : Verdict::fail);

            const auto als = tensor_norm(B, P, als_opts);
            const double als_err = relative_gap(als.value, est.value, 0.0);
            als_row.max_error = std::max(als_row.max_error, als_err);
            tally(als_row, als_err <= als_row.tolerance ? Verdict::pass : Verdict::fail);
        }

        // d = 2 arrays with equal dims n in {2, 3, 4}.
        const CounterRng rng(derive_seed(seed, 60000 + u), 0);
        const std::size_t n = 2 + pick(rng, 0, 3);
        const Dims dims({n, n});
        const auto labels = axis_range(1, 4);
        const auto B2d = normal_array(labels, {n, n, n, n}, rng, 1000);

        {
            auto parts = all_partitions(labels);
            parts.erase(std::remove_if(parts.begin(), parts.end(), [](const Partition& P) { return P.size() < 2; }),
                        parts.end());
            const auto& P = parts[pick(rng, 1, parts.size())];
            const std::size_t a = pick(rng, 2, P.size());
            std::size_t b = pick(rng, 3, P.size() - 1);
            if (b >= a) {
                ++b;
            }
            const auto r = verify_merge_split(B2d, P, a, b, norm_opts);
            merge_row.max_error = std::max(merge_row.max_error, r.lift_error);
            tally(merge_row, r.verdict);
        }
        {
            const auto I = subsets(axis_range(1, 2))[pick(rng, 4, 4)];
            const auto parts = all_partitions(labels);
            const auto& P = parts[pick(rng, 5, parts.size())];
            tally(diag_row, verify_diagonal_restriction(B2d, I, P, norm_opts).verdict);
        }

        // B = A^T A for a random A with N columns.
        const std::size_t n0 = 1 + pick(rng, 6, n * n);
        const auto Bg = gram_array(random_gaussian_matrix(n0, n * n, derive_seed(seed, 70000 + u)), dims);
        {
            const AxisSet I{static_cast<int>(1 + pick(rng, 7, 2))};
            const auto rest = axis_difference(axis_range(1, 2), I);
            const auto parts = all_partitions(axis_union(rest, axis_shift(rest, 2)));
            const auto& P = parts[pick(rng, 8, parts.size())];
            const auto r = verify_lift(Bg, I, P, norm_opts);
            lift_row.max_error = std::max(lift_row.max_error, r.lift_error);
            tally(lift_row, r.verdict);
        }
        {
            const auto I = subsets(axis_range(1, 2))[pick(rng, 9, 3)];  // {}, {1}, {2}
            const auto rest = axis_difference(axis_range(1, 2), I);
            const auto parts = all_partitions(axis_union(rest, axis_shift(rest, 2)));
            const auto& P = parts[pick(rng, 10, parts.size())];
            tally(bounds_row, verify_reduced_norm_bounds(Bg, I, P, norm_opts).verdict);
        }
    }
    for (auto* row : {&spectral_row, &als_row, &merge_row, &diag_row, &lift_row, &bounds_row}) {
        rep.verdict = combine(rep.verdict, row->verdict);
        rep.rows.push_back(*row);
    }
    return rep;
}

}  // namespace kronchaos
