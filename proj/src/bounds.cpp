#include "kronchaos/bounds.hpp"

#include "kronchaos/errors.hpp"
#include "kronchaos/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kronchaos {

namespace {

std::string set_string(const AxisSet& s)
{
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out += (k > 0 ? "," : "") + std::to_string(s[k]);
    }
    return out + "}";
}

// Sums out `traced` (paired axes) and keeps `diag` axes only on their diagonal.
TensorArray reduce_paired(const TensorArray& A2d, const AxisSet& traced, const AxisSet& diag)
{
    const auto d = static_cast<int>(half_order(A2d));
    const auto keep_base = axis_difference(axis_range(1, d), traced);
    const auto labels = axis_union(keep_base, axis_shift(keep_base, d));
    std::vector<std::size_t> shape;
    for (int l : labels) {
        shape.push_back(A2d.extent(l));
    }
    auto out = TensorArray::zeros(labels, shape);
    std::vector<double> data(out.size(), 0.0);
    std::vector<std::size_t> src_pos;
    for (int l : labels) {
        src_pos.push_back(A2d.position(l));
    }
    const auto checked = axis_union(traced, diag);
    Odometer odo(A2d.shape());
    for (std::size_t e = 0; e < A2d.size(); ++e, odo.advance()) {
        const auto& idx = odo.index();
        bool on_diag = true;
        for (int l : checked) {
            if (idx[static_cast<std::size_t>(l - 1)] != idx[static_cast<std::size_t>(l - 1 + d)]) {
                on_diag = false;
                break;
            }
        }
        if (!on_diag) {
            continue;
        }
        std::size_t off = 0;
        for (std::size_t k = 0; k < src_pos.size(); ++k) {
            off += idx[src_pos[k]] * out.strides()[k];
        }
        data[off] += A2d[e];
    }
    return TensorArray(labels, shape, std::move(data));
}

std::size_t swapped_offset(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& strides, std::size_t d,
                           std::size_t mask)
{
    std::size_t off = 0;
    for (std::size_t l = 0; l < d; ++l) {
        const bool swap = (mask >> l) & 1u;
        off += idx[swap ? l + d : l] * strides[l] + idx[swap ? l : l + d] * strides[l + d];
    }
    return off;
}

NormTable build_table(const std::vector<std::pair<AxisSet, TensorArray>>& arrays, std::size_t d, int max_kappa,
                      const NormOptions& opts)
{
    NormTable table;
    table.d = d;
    table.max_kappa = max_kappa;
    std::vector<std::size_t> source;
    for (std::size_t a = 0; a < arrays.size(); ++a) {
        const auto& labels = arrays[a].second.labels();
        for (auto& P : all_partitions(labels)) {
            table.terms.push_back(NormTerm{arrays[a].first, std::move(P), {}});
            source.push_back(a);
        }
    }
    NormOptions inner = opts;
    inner.threads = 1;
    parallel_for(table.terms.size(), 1, opts.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            table.terms[t].norm = tensor_norm(arrays[source[t]].second, table.terms[t].partition, inner);
        }
    });
    return table;
}

double spectral_norm(const Matrix& A)
{
    if (A.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<Matrix> svd(A);
    return svd.singularValues()[0];
}

}  // namespace

double expected_chaos(const TensorArray& A2d)
{
    const auto N = base_dims(A2d).total();
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        s += A2d[k * N + k];
    }
    return s;
}

TensorArray build_reduced_array(const TensorArray& A2d, const AxisSet& I)
{
    const auto d = static_cast<int>(half_order(A2d));
    const auto axes = make_axis_set(I);
    if (!axis_subset(axes, axis_range(1, d))) {
        throw AxisError("build_reduced_array: I must be a subset of [d]");
    }
    if (axes.empty()) {
        return A2d;
    }
    return reduce_paired(A2d, axes, {});
}

TensorArray build_reduced_array_diag(const TensorArray& A2d, const AxisSet& I, const AxisSet& J)
{
    const auto d = static_cast<int>(half_order(A2d));
    const auto Iset = make_axis_set(I);
    const auto Jset = make_axis_set(J);
    if (!axis_subset(Iset, axis_range(1, d))) {
        throw AxisError("build_reduced_array_diag: I must be a subset of [d]");
    }
    if (!axis_subset(Jset, Iset)) {
        throw AxisError("build_reduced_array_diag: J must be a subset of I");
    }
    if (Iset.empty()) {
        return A2d;
    }
    return reduce_paired(A2d, axis_difference(Iset, Jset), Jset);
}

TensorArray sum_out_axes(const TensorArray& B, const AxisSet& I)
{
    const auto axes = make_axis_set(I);
    if (!axis_subset(axes, B.labels())) {
        throw AxisError("sum_out_axes: I must be a subset of the array labels");
    }
    const auto labels = axis_difference(B.labels(), axes);
    std::vector<std::size_t> shape;
    std::vector<std::size_t> src_pos;
    for (int l : labels) {
        shape.push_back(B.extent(l));
        src_pos.push_back(B.position(l));
    }
    auto out = TensorArray::zeros(labels, shape);
    std::vector<double> data(out.size(), 0.0);
    Odometer odo(B.shape());
    for (std::size_t e = 0; e < B.size(); ++e, odo.advance()) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < src_pos.size(); ++k) {
            off += odo.index()[src_pos[k]] * out.strides()[k];
        }
        data[off] += B[e];
    }
    return TensorArray(labels, shape, std::move(data));
}

TensorArray symmetrize(const TensorArray& A2d)
{
    const auto d = half_order(A2d);
    if (d > 20) {
        throw SizeError("symmetrize: order too large");
    }
    const std::size_t masks = std::size_t{1} << d;
    std::vector<double> data(A2d.size());
    std::vector<double> vals(masks);
    Odometer odo(A2d.shape());
    for (std::size_t e = 0; e < A2d.size(); ++e, odo.advance()) {
        for (std::size_t m = 0; m < masks; ++m) {
            vals[m] = A2d[swapped_offset(odo.index(), A2d.strides(), d, m)];
        }
        // Every entry of an orbit sees the same multiset; a fixed summation
        // order makes the result exactly symmetric.
        std::sort(vals.begin(), vals.end());
        double s = 0.0;
        for (double v : vals) {
            s += v;
        }
        data[e] = std::ldexp(s, -static_cast<int>(d));
    }
    return TensorArray(A2d.labels(), A2d.shape(), std::move(data));
}

bool check_symmetry(const TensorArray& A2d)
{
    const auto d = half_order(A2d);
    Odometer odo(A2d.shape());
    for (std::size_t e = 0; e < A2d.size(); ++e, odo.advance()) {
        for (std::size_t l = 0; l < d; ++l) {
            if (A2d[swapped_offset(odo.index(), A2d.strides(), d, std::size_t{1} << l)] != A2d[e]) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::string> NormTable::warnings() const
{
    std::vector<std::string> out;
    for (const auto& t : terms) {
        if (!t.norm.warning.empty()) {
            out.push_back("I=" + set_string(t.I) + " P=" + t.partition.to_string() + ": " + t.norm.warning);
        }
    }
    return out;
}

bool NormTable::has_lower_bounds() const
{
    return std::any_of(terms.begin(), terms.end(), [](const NormTerm& t) { return t.norm.certified_lower_bound; });
}

NormTable partition_norm_table(const TensorArray& B, const NormOptions& opts)
{
    if (B.order() == 0) {
        throw ShapeError("partition_norm_table: array must have order >= 1");
    }
    std::vector<std::pair<AxisSet, TensorArray>> arrays{{AxisSet{}, B}};
    return build_table(arrays, B.order(), static_cast<int>(B.order()), opts);
}

NormTable reduced_norm_table(const TensorArray& A2d, const NormOptions& opts)
{
    const auto d = half_order(A2d);
    const auto full = axis_range(1, static_cast<int>(d));
    std::vector<std::pair<AxisSet, TensorArray>> arrays;
    for (const auto& I : subsets(full)) {
        if (I.size() == d) {
            continue;
        }
        arrays.emplace_back(I, build_reduced_array(A2d, I));
    }
    return build_table(arrays, d, static_cast<int>(2 * d), opts);
}

std::vector<double> kappa_sums(const NormTable& table)
{
    std::vector<double> sums(static_cast<std::size_t>(table.max_kappa), 0.0);
    for (const auto& t : table.terms) {
        sums[static_cast<std::size_t>(t.kappa() - 1)] += t.norm.value;
    }
    return sums;
}

double mp_decoupled_from(const NormTable& table, double p)
{
    if (!(p >= 1.0)) {
        throw ArgumentError("m_p(B) needs p >= 1");
    }
    const auto sums = kappa_sums(table);
    double m = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        m += std::pow(p, static_cast<double>(k + 1) / 2.0) * sums[k];
    }
    return m;
}

double mp_main_from(const NormTable& table, double p, double L)
{
    if (!(p >= 2.0)) {
        throw ArgumentError("m_p needs p >= 2");
    }
    if (!(L >= 1.0)) {
        throw ArgumentError("m_p needs L >= 1");
    }
    const auto sums = kappa_sums(table);
    double m = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        m += std::pow(p, static_cast<double>(k + 1) / 2.0) * sums[k];
    }
    return std::pow(L, 2.0 * static_cast<double>(table.d)) * m;
}

double mp_norm_from(const NormTable& table, double p, double L, double frobenius_A)
{
    if (!(frobenius_A > 0.0)) {
        throw DegenerateInputError("m_p for ||AX||_2 needs A != 0");
    }
    if (!(p >= 2.0)) {
        throw ArgumentError("m_p needs p >= 2");
    }
    if (!(L >= 1.0)) {
        throw ArgumentError("m_p needs L >= 1");
    }
    const auto sums = kappa_sums(table);
    double m = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        const double kappa = static_cast<double>(k + 1);
        m += std::min(std::pow(p, kappa / 2.0) * sums[k] / frobenius_A, std::pow(p, kappa / 4.0) * std::sqrt(sums[k]));
    }
    return std::pow(L, 2.0 * static_cast<double>(table.d)) * m;
}

double mp_decoupled(const TensorArray& B, double p, const NormOptions& opts)
{
    if (!(p >= 1.0)) {
        throw ArgumentError("m_p(B) needs p >= 1");
    }
    return mp_decoupled_from(partition_norm_table(B, opts), p);
}

double mp_main(const TensorArray& A2d, double p, double L, const NormOptions& opts)
{
    if (!(p >= 2.0) || !(L >= 1.0)) {
        throw ArgumentError("m_p needs p >= 2 and L >= 1");
    }
    return mp_main_from(reduced_norm_table(A2d, opts), p, L);
}

TensorArray gram_array(const Matrix& A, const Dims& dims)
{
    if (static_cast<std::size_t>(A.cols()) != dims.total()) {
        throw ShapeError("matrix has " + std::to_string(A.cols()) + " columns but dims require " +
                         std::to_string(dims.total()));
    }
    return rearrange_matrix(A.transpose() * A, dims);
}

double mp_norm(const Matrix& A, const Dims& dims, double p, double L, const NormOptions& opts)
{
    const double fa = A.norm();
    if (!(fa > 0.0)) {
        throw DegenerateInputError("m_p for ||AX||_2 needs A != 0");
    }
    if (!(p >= 2.0) || !(L >= 1.0)) {
        throw ArgumentError("m_p needs p >= 2 and L >= 1");
    }
    return mp_norm_from(reduced_norm_table(gram_array(A, dims), opts), p, L, fa);
}

std::vector<std::pair<int, double>> tail_exponents(const Matrix& A, std::size_t n, std::size_t d, double t)
{
    if (n == 0 || d == 0) {
        throw ArgumentError("tail bound: n and d must be positive");
    }
    const double N = std::pow(static_cast<double>(n), static_cast<double>(d));
    if (static_cast<double>(A.cols()) != N) {
        throw ShapeError("tail bound: matrix must have n^d columns");
    }
    if (!(t >= 0.0)) {
        throw ArgumentError("tail bound: need t >= 0");
    }
    const double fro = A.norm();
    if (!(fro > 0.0)) {
        throw DegenerateInputError("tail bound: A must be nonzero");
    }
    const double s = spectral_norm(A);
    const double nd = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    std::vector<std::pair<int, double>> out;
    const double split = std::pow(nd, dd / 2.0) * s;
    if (t <= split) {
        out.emplace_back(1, t * t / (std::pow(nd, dd - 1.0) * s * s));
    }
    if (t >= split) {
        out.emplace_back(2, std::pow(t / s, 2.0 / dd));
    }
    const double q = std::pow(nd, (dd - 1.0) / 4.0);
    if (q * s <= t && t <= q * fro) {
        out.emplace_back(3, t * t / (std::pow(nd, (dd - 1.0) / 2.0) * fro * fro));
    }
    return out;
}

TailBound tail_bound_ax(const Matrix& A, std::size_t n, std::size_t d, double t, double C)
{
    if (!(C > 0.0)) {
        throw ArgumentError("tail bound: need C > 0");
    }
    TailBound out;
    const double e2 = std::exp(2.0);
    for (const auto& [r, x] : tail_exponents(A, n, d, t)) {
        out.evaluated.emplace_back(r, e2 * std::exp(-C * x));
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [r, v] : out.evaluated) {
        best = std::min(best, v);
    }
    for (const auto& [r, v] : out.evaluated) {
        if (v == best) {
            out.regimes.push_back(r);
        }
    }
    out.value = std::clamp(best, 0.0, 1.0);
    return out;
}

double moments_to_tail(const MixedMomentBound& M, double t)
{
    if (!(t > 0.0)) {
        throw ArgumentError("moments_to_tail: t must be positive");
    }
    if (!(M.p0 >= 0.0) || M.terms.empty()) {
        throw ArgumentError("moments_to_tail: need p0 >= 0 and at least one term");
    }
    const double D = static_cast<double>(M.terms.size());
    double min_k = std::numeric_limits<double>::infinity();
    for (const auto& row : M.terms) {
        if (row.empty()) {
            throw ArgumentError("moments_to_tail: every term needs at least one label");
        }
        double max_l = -std::numeric_limits<double>::infinity();
        for (const auto& term : row) {
            if (!(term.exponent > 0.0) || !(term.scale > 0.0)) {
                throw ArgumentError("moments_to_tail: exponents and scales must be positive");
            }
            max_l = std::max(max_l, std::pow(t / (std::numbers::e * D * term.scale), 1.0 / term.exponent));
        }
        min_k = std::min(min_k, max_l);
    }
    return std::clamp(std::exp(M.p0 - min_k), 0.0, 1.0);
}

DeviationEnvelope compare_norm_deviation(double a, double b)
{
    if (!(b > 0.0) || !(a >= 0.0)) {
        throw ArgumentError("compare_norm_deviation: need a >= 0 and b > 0");
    }
    const double diff = std::abs(a * a - b * b);
    const double m = std::min(diff / b, std::sqrt(diff));
    return {m / 3.0, m};
}

LiftReport verify_lift(const TensorArray& B2d, const AxisSet& I, const Partition& P, const NormOptions& opts)
{
    const auto d = static_cast<int>(half_order(B2d));
    const auto Iset = make_axis_set(I);
    LiftReport rep;
    const auto reduced = build_reduced_array(B2d, Iset);
    rep.reduced = tensor_norm(reduced, P, opts);

    auto blocks = P.blocks;
    double root_n = 1.0;
    for (int j : Iset) {
        blocks.push_back({j, j + d});
        root_n *= std::sqrt(static_cast<double>(B2d.extent(j)));
    }
    rep.extended_partition = make_partition(axis_range(1, 2 * d), blocks);

    auto lift = [&](const BlockFactors& f) {
        BlockFactors out;
        for (const auto& block : rep.extended_partition.blocks) {
            const auto it = std::find(P.blocks.begin(), P.blocks.end(), block);
            if (it != P.blocks.end()) {
                out.push_back(f[static_cast<std::size_t>(it - P.blocks.begin())]);
                continue;
            }
            const auto n = B2d.extent(block[0]);
            Vector diag = Vector::Zero(static_cast<Eigen::Index>(n * n));
            for (std::size_t k = 0; k < n; ++k) {
                diag[static_cast<Eigen::Index>(k * n + k)] = 1.0 / std::sqrt(static_cast<double>(n));
            }
            out.push_back(std::move(diag));
        }
        return out;
    };

    const double scale = std::max({frobenius(B2d), frobenius(reduced), std::numeric_limits<double>::min()});
    for (const auto& cand : rep.reduced.candidates) {
        const double left = multilinear_form(reduced, P, cand.factors);
        const double right = root_n * multilinear_form(B2d, rep.extended_partition, lift(cand.factors));
        rep.lift_error = std::max(rep.lift_error, std::abs(left - right) / scale);
    }
    NormOptions ext_opts = opts;
    ext_opts.warm_starts = {lift(rep.reduced.factors)};
    rep.extended = tensor_norm(B2d, rep.extended_partition, ext_opts);
    rep.check = check_leq("reduced <= sqrt(prod n) * extended", rep.reduced.value, root_n * rep.extended.value,
                          rep.extended.exact(), 1e-6, 1e-12 * scale);
    rep.verdict = rep.check.verdict;
    if (rep.lift_error > 1e-9) {
        rep.verdict = Verdict::fail;
    }
    return rep;
}

ReducedNormBoundsReport verify_reduced_norm_bounds(const TensorArray& B2d, const AxisSet& I, const Partition& P,
                                                   const NormOptions& opts)
{
    const auto dims = base_dims(B2d);
    if (!dims.all_equal()) {
        throw ArgumentError("verify_reduced_norm_bounds: needs equal dims along every axis");
    }
    const auto Iset = make_axis_set(I);
    const double n = static_cast<double>(dims.sizes()[0]);
    const double d = static_cast<double>(dims.order());
    ReducedNormBoundsReport rep;
    rep.reduced = tensor_norm(build_reduced_array(B2d, Iset), P, opts);
    const double fro = frobenius(B2d);
    const double spec = spectral_norm(to_matrix(B2d));
    const double kappa = static_cast<double>(P.size());
    const double abs_slack = 1e-12 * std::max(fro, std::numeric_limits<double>::min());
    rep.frobenius_bound = check_leq("reduced <= n^{|I|/2} ||B||_F", rep.reduced.value,
                                    std::pow(n, static_cast<double>(Iset.size()) / 2.0) * fro, true, 1e-6, abs_slack);
    rep.spectral_bound = check_leq("reduced <= n^{d - kappa/2} ||B||_2", rep.reduced.value,
                                   std::pow(n, d - kappa / 2.0) * spec, true, 1e-6, abs_slack);
    rep.verdict = combine(rep.frobenius_bound.verdict, rep.spectral_bound.verdict);
    return rep;
}

BoundReport make_bound_report(const Matrix& A, const Dims& dims, const std::vector<double>& p_grid,
                              const std::vector<double>& t_grid, double L, double C_tail, const NormOptions& opts)
{
    const auto N = dims.total();
    if (static_cast<std::size_t>(A.cols()) != N) {
        throw ShapeError("matrix has " + std::to_string(A.cols()) + " columns but dims require " + std::to_string(N));
    }
    for (double p : p_grid) {
        if (!(p >= 2.0)) {
            throw ArgumentError("bound report: p values must be >= 2");
        }
    }
    for (double t : t_grid) {
        if (!(t >= 0.0)) {
            throw ArgumentError("bound report: t values must be >= 0");
        }
    }
    if (!(L >= 1.0) || !(C_tail > 0.0)) {
        throw ArgumentError("bound report: need L >= 1 and C > 0");
    }
    BoundReport rep;
    rep.dims = dims.sizes();
    rep.L = L;
    rep.C_tail = C_tail;
    const double Lpow = std::pow(L, 2.0 * static_cast<double>(dims.order()));
    if (static_cast<std::size_t>(A.rows()) == N) {
        rep.has_main_table = true;
        rep.main_table = reduced_norm_table(rearrange_matrix(A, dims), opts);
        for (const auto& w : rep.main_table.warnings()) {
            rep.warnings.push_back(w);
        }
    } else {
        rep.notes.emplace_back("matrix is not square: chaos m_p skipped");
    }
    const double fro = A.norm();
    if (fro > 0.0) {
        rep.has_gram_table = true;
        rep.gram_table = reduced_norm_table(gram_array(A, dims), opts);
        for (const auto& w : rep.gram_table.warnings()) {
            rep.warnings.push_back(w);
        }
    } else {
        rep.notes.emplace_back("zero matrix: norm m_p and tail bounds skipped");
    }
    const auto sums = rep.has_main_table ? kappa_sums(rep.main_table) : std::vector<double>{};
    for (double p : p_grid) {
        BoundRow row;
        row.p = p;
        if (rep.has_main_table) {
            row.has_main = true;
            row.mp_main = mp_main_from(rep.main_table, p, L);
            for (std::size_t k = 0; k < sums.size(); ++k) {
                row.mp_kappa.push_back(Lpow * std::pow(p, static_cast<double>(k + 1) / 2.0) * sums[k]);
            }
        }
        if (rep.has_gram_table) {
            row.has_norm = true;
            row.mp_norm = mp_norm_from(rep.gram_table, p, L, fro);
        }
        rep.rows.push_back(std::move(row));
    }
    if (!t_grid.empty()) {
        if (fro > 0.0 && dims.all_equal()) {
            for (double t : t_grid) {
                rep.tails.push_back({t, tail_bound_ax(A, dims.sizes()[0], dims.order(), t, C_tail)});
            }
        } else if (fro > 0.0) {
            rep.notes.emplace_back("dims differ across axes: tail curve skipped");
        }
    }
    return rep;
}

}  // namespace kronchaos
