#include "kronchaos/montecarlo.hpp"

#include "kronchaos/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <random>

namespace kronchaos {

namespace {

__extension__ typedef unsigned __int128 u128;

double round_up_3(double x)
{
    return std::ceil(x * 1000.0 - 1e-9) / 1000.0;
}

// Stored psi_2 values, sup_p ||Y||_p / sqrt(p) rounded up to 3 digits;
// tests recompute them with psi2_numeric.
constexpr double psi2_gaussian = 0.798;
constexpr double psi2_rademacher = 1.000;
constexpr double psi2_uniform_sym = 0.867;
constexpr double psi2_two_point_quarter = 0.729;

constexpr double wilson_z = 1.959964;

std::uint64_t bounded(std::uint64_t x, std::uint64_t range)
{
    return static_cast<std::uint64_t>((static_cast<u128>(x) * range) >> 64);
}

}  // namespace

DistributionSpec DistributionSpec::make(Family family, double q)
{
    DistributionSpec d;
    d.family = family;
    switch (family) {
    case Family::gaussian:
        d.psi2 = psi2_gaussian;
        break;
    case Family::rademacher:
        d.psi2 = psi2_rademacher;
        break;
    case Family::uniform_sym:
        d.psi2 = psi2_uniform_sym;
        break;
    case Family::two_point:
        if (!(q > 0.0 && q <= 0.5)) {
            throw ArgumentError("two_point needs 0 < q <= 1/2");
        }
        d.q = q;
        d.psi2 = q == 0.25 ? psi2_two_point_quarter : round_up_3(psi2_numeric(family, q));
        break;
    }
    return d;
}

DistributionSpec DistributionSpec::parse(const std::string& name)
{
    if (name == "gaussian") {
        return make(Family::gaussian);
    }
    if (name == "rademacher") {
        return make(Family::rademacher);
    }
    if (name == "uniform_sym") {
        return make(Family::uniform_sym);
    }
    if (name == "two_point") {
        return make(Family::two_point);
    }
    if (name.rfind("two_point:", 0) == 0) {
        const auto rest = name.substr(10);
        std::size_t used = 0;
        double q = 0.0;
        try {
            q = std::stod(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != rest.size()) {
            throw ArgumentError("bad two_point parameter: " + rest);
        }
        return make(Family::two_point, q);
    }
    throw ArgumentError("unknown distribution: " + name);
}

std::string DistributionSpec::name() const
{
    switch (family) {
    case Family::gaussian:
        return "gaussian";
    case Family::rademacher:
        return "rademacher";
    case Family::uniform_sym:
        return "uniform_sym";
    case Family::two_point: {
        if (q == 0.25) {
            return "two_point";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "two_point:%.17g", q);
        return buf;
    }
    }
    return "unknown";
}

double DistributionSpec::draw(const CounterRng& rng, std::uint64_t index) const
{
    switch (family) {
    case Family::gaussian:
        return rng.normal(index);
    case Family::rademacher:
        return (rng.block(index)[0] & 1u) ? 1.0 : -1.0;
    case Family::uniform_sym:
        return std::numbers::sqrt3 * (2.0 * rng.uniform(index) - 1.0);
    case Family::two_point: {
        const double u = rng.uniform(index);
        const double a = 1.0 / std::sqrt(2.0 * q);
        return u < q ? a : (u < 2.0 * q ? -a : 0.0);
    }
    }
    return 0.0;
}

double absolute_moment(const DistributionSpec& dist, double p)
{
    if (!(p > 0.0)) {
        throw ArgumentError("absolute_moment: p must be positive");
    }
    switch (dist.family) {
    case Family::gaussian:
        return std::exp((0.5 * p * std::numbers::ln2 + std::lgamma((p + 1.0) / 2.0) - 0.5 * std::log(std::numbers::pi)) / p);
    case Family::rademacher:
        return 1.0;
    case Family::uniform_sym:
        return std::numbers::sqrt3 * std::pow(p + 1.0, -1.0 / p);
    case Family::two_point:
        return std::pow(2.0 * dist.q, 1.0 / p) / std::sqrt(2.0 * dist.q);
    }
    return 0.0;
}

double psi2_numeric(Family family, double q)
{
    DistributionSpec d;
    d.family = family;
    d.q = q;
    double best = 0.0;
    for (int k = 0; k <= 63000; ++k) {
        const double p = 1.0 + 0.001 * k;
        best = std::max(best, absolute_moment(d, p) / std::sqrt(p));
    }
    return best;
}

std::vector<Vector> sample_factors(const Dims& dims, const DistributionSpec& dist, std::uint64_t seed,
                                   std::uint64_t sample, std::uint64_t stream)
{
    std::uint64_t n_sum = 0;
    for (auto n : dims.sizes()) {
        n_sum += n;
    }
    const CounterRng rng(seed, stream);
    std::vector<Vector> out;
    std::uint64_t offset = sample * n_sum;
    for (auto n : dims.sizes()) {
        Vector x(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            x[static_cast<Eigen::Index>(j)] = dist.draw(rng, offset + j);
        }
        offset += n;
        out.push_back(std::move(x));
    }
    return out;
}

Vector kronecker_vector(const std::vector<Vector>& factors)
{
    if (factors.empty()) {
        throw ArgumentError("kronecker_vector: need at least one factor");
    }
    std::vector<std::size_t> sizes;
    for (const auto& f : factors) {
        sizes.push_back(static_cast<std::size_t>(f.size()));
    }
    const Dims dims(sizes);  // validates sizes and overflow
    Vector X(static_cast<Eigen::Index>(dims.total()));
    X[0] = 1.0;
    Eigen::Index len = 1;
    for (const auto& f : factors) {
        // Expand in place from the back so earlier axes stay slowest.
        for (Eigen::Index a = len; a-- > 0;) {
            const double v = X[a];
            for (Eigen::Index j = f.size(); j-- > 0;) {
                X[a * f.size() + j] = v * f[j];
            }
        }
        len *= f.size();
    }
    return X;
}

double chaos_statistic(const Matrix& A, const std::vector<Vector>& factors)
{
    const Vector X = kronecker_vector(factors);
    if (A.rows() != X.size() || A.cols() != X.size()) {
        throw ShapeError("chaos_statistic: matrix does not match the Kronecker dimension");
    }
    // Diagonal entries are subtracted term by term, so that x_i^2 = 1
    // (rademacher) cancels them exactly.
    const Vector AX = A * X;
    double s = 0.0;
    for (Eigen::Index i = 0; i < X.size(); ++i) {
        s += X[i] * AX[i] - A(i, i);
    }
    return s;
}

double norm_statistic(const Matrix& A, const std::vector<Vector>& factors)
{
    const Vector X = kronecker_vector(factors);
    if (A.cols() != X.size()) {
        throw ShapeError("norm_statistic: matrix columns do not match the Kronecker dimension");
    }
    return (A * X).norm() - A.norm();
}

double semi_decoupled_term(const TensorArray& A2d, const AxisSet& I, const AxisSet& J,
                           const std::vector<Vector>& factors, const std::vector<Vector>& factors_bar,
                           bool distinct_pairs)
{
    const auto d = half_order(A2d);
    const auto full = axis_range(1, static_cast<int>(d));
    const auto Iset = make_axis_set(I);
    const auto Jset = make_axis_set(J);
    if (!axis_subset(Iset, full) || !axis_subset(Jset, Iset)) {
        throw AxisError("semi_decoupled_term: need J subset of I subset of [d]");
    }
    if (axis_difference(Iset, Jset) == full) {
        throw AxisError("semi_decoupled_term: I \\ J must differ from [d]");
    }
    if (factors.size() != d || factors_bar.size() != d) {
        throw ShapeError("semi_decoupled_term: need d factors and d copies");
    }
    // Per-axis weight w_l(a, b) for the coordinate pair (i_l, i'_l).
    std::vector<Matrix> W(d);
    for (std::size_t l = 0; l < d; ++l) {
        const auto n = static_cast<Eigen::Index>(A2d.shape()[l]);
        if (factors[l].size() != n || factors_bar[l].size() != n) {
            throw ShapeError("semi_decoupled_term: factor length does not match its axis");
        }
        const int label = static_cast<int>(l + 1);
        if (std::binary_search(Jset.begin(), Jset.end(), label)) {
            W[l] = Matrix::Zero(n, n);
            for (Eigen::Index a = 0; a < n; ++a) {
                W[l](a, a) = factors[l][a] * factors[l][a] - 1.0;
            }
        } else if (std::binary_search(Iset.begin(), Iset.end(), label)) {
            W[l] = Matrix::Identity(n, n);
        } else {
            W[l] = factors[l] * factors_bar[l].transpose();
            if (distinct_pairs) {
                W[l].diagonal().setZero();
            }
        }
    }
    double s = 0.0;
    Odometer odo(A2d.shape());
    for (std::size_t e = 0; e < A2d.size(); ++e, odo.advance()) {
        double w = A2d[e];
        for (std::size_t l = 0; l < d && w != 0.0; ++l) {
            w *= W[l](static_cast<Eigen::Index>(odo.index()[l]), static_cast<Eigen::Index>(odo.index()[l + d]));
        }
        s += w;
    }
    return s;
}

EmpiricalMoment estimate_lp(const SampleBatch& batch, double p)
{
    if (batch.values.empty()) {
        throw ArgumentError("estimate_lp: empty batch");
    }
    if (!(p >= 1.0)) {
        throw ArgumentError("estimate_lp: p must be >= 1");
    }
    const auto S = batch.values.size();
    EmpiricalMoment m;
    m.p = p;
    m.samples = S;
    double scale = 0.0;
    for (double v : batch.values) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        return m;
    }
    std::vector<double> w(S);
    double total = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
        w[i] = std::pow(std::abs(batch.values[i]) / scale, p);
        total += w[i];
    }
    const double inv_p = 1.0 / p;
    m.estimate = scale * std::pow(total / static_cast<double>(S), inv_p);

    std::mt19937_64 gen(derive_seed(batch.seed, std::bit_cast<std::uint64_t>(p)));
    std::vector<double> boot(bootstrap_resamples);
    for (auto& b : boot) {
        double s = 0.0;
        for (std::size_t i = 0; i < S; ++i) {
            s += w[bounded(gen(), S)];
        }
        b = scale * std::pow(s / static_cast<double>(S), inv_p);
    }
    std::sort(boot.begin(), boot.end());
    const auto lo = static_cast<std::size_t>(0.025 * bootstrap_resamples);
    const auto hi = static_cast<std::size_t>(std::ceil(0.975 * bootstrap_resamples)) - 1;
    m.ci_low = std::min(boot[lo], m.estimate);
    m.ci_high = std::max(boot[hi], m.estimate);
    return m;
}

TailFrequency estimate_tail(const SampleBatch& batch, double t)
{
    if (batch.values.empty()) {
        throw ArgumentError("estimate_tail: empty batch");
    }
    TailFrequency f;
    f.t = t;
    f.samples = batch.values.size();
    for (double v : batch.values) {
        if (std::abs(v) > t) {
            ++f.exceed;
        }
    }
    const double S = static_cast<double>(f.samples);
    const double ph = static_cast<double>(f.exceed) / S;
    const double z2 = wilson_z * wilson_z;
    const double denom = 1.0 + z2 / S;
    const double center = (ph + z2 / (2.0 * S)) / denom;
    const double half = wilson_z * std::sqrt(ph * (1.0 - ph) / S + z2 / (4.0 * S * S)) / denom;
    f.frequency = ph;
    f.ci_low = std::clamp(center - half, 0.0, ph);
    f.ci_high = std::clamp(center + half, ph, 1.0);
    return f;
}

Verdict band_verdict(double lhs_low, double lhs_high, double rhs_low, double rhs_high)
{
    if (lhs_high <= rhs_low) {
        return Verdict::pass;
    }
    if (lhs_low > rhs_high) {
        return Verdict::fail;
    }
    return Verdict::inconclusive_pass;
}

Matrix random_gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    const CounterRng rng(seed, 7);
    Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rng.normal(r * cols + c);
        }
    }
    return M;
}

}  // namespace kronchaos
