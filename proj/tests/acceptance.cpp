// Acceptance checks, one line per criterion. Exit status is nonzero when any
// criterion fails.

#include "kronchaos/cli.hpp"
#include "kronchaos/io.hpp"
#include "kronchaos/montecarlo.hpp"
#include "kronchaos/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace kronchaos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

MonteCarloOptions mc(std::size_t samples, std::uint64_t seed)
{
    MonteCarloOptions o;
    o.samples = samples;
    o.seed = seed;
    return o;
}

Outcome identities()
{
    const auto r = run_identities(20240601, 100);
    Outcome o;
    for (const auto& row : r.rows) {
        const bool good = row.verdict == Verdict::pass && row.max_rel_error <= 1e-10 && row.instances == 100;
        o.ok = o.ok && good;
        o.detail += row.name + "=" + fmt(row.max_rel_error) + " ";
    }
    o.ok = o.ok && r.rows.size() == 5;
    return o;
}

Outcome norms()
{
    const auto r = run_norm_suite(20240602, 50);
    Outcome o;
    for (const auto& row : r.rows) {
        bool good = row.failed == 0 && row.instances >= 50;
        if (row.name == "spectral-vs-eigen") {
            good = good && row.max_error <= 1e-8;
        }
        o.ok = o.ok && good;
        o.detail += row.name + "=" + std::to_string(row.passed) + "/" + std::to_string(row.instances) + " ";
    }
    o.ok = o.ok && r.verdict != Verdict::fail;
    return o;
}

Outcome anchors()
{
    Outcome o;
    const std::size_t S = 100000;
    const auto g = DistributionSpec::make(Family::gaussian);
    for (std::size_t n : {1u, 4u, 8u}) {
        SampleBatch b;
        b.seed = 31;
        const Matrix I = Matrix::Identity(static_cast<long>(n), static_cast<long>(n));
        for (std::uint64_t s = 0; s < S; ++s) {
            b.values.push_back(chaos_statistic(I, sample_factors(Dims({n}), g, b.seed, s)));
        }
        const double l2 = estimate_lp(b, 2.0).estimate;
        const double rel = std::abs(l2 / std::sqrt(2.0 * n) - 1.0);
        o.ok = o.ok && rel <= 0.05;
        o.detail += "L2(n=" + std::to_string(n) + ") rel=" + fmt(rel) + " ";
    }

    SampleBatch normal;
    const CounterRng rng(32, 0);
    for (std::uint64_t k = 0; k < S; ++k) {
        normal.values.push_back(g.draw(rng, k));
    }
    const double f = estimate_tail(normal, 1.96).frequency;
    o.ok = o.ok && std::abs(f - 0.05) <= 0.005;
    o.detail += "tail(1.96)=" + fmt(f) + " ";

    const auto rad = DistributionSpec::make(Family::rademacher);
    std::size_t nonzero = 0;
    for (const auto& sizes : std::vector<std::vector<std::size_t>>{{4}, {2, 3}, {2, 2, 3}}) {
        const Dims dims(sizes);
        const Vector diag = random_gaussian_matrix(dims.total(), 1, 33).col(0);
        const Matrix D = diag.asDiagonal();
        for (std::uint64_t s = 0; s < 10000; ++s) {
            nonzero += chaos_statistic(D, sample_factors(dims, rad, 34, s)) != 0.0;
        }
    }
    o.ok = o.ok && nonzero == 0;
    o.detail += "rademacher-diagonal nonzero=" + std::to_string(nonzero);
    return o;
}

Outcome decoupling()
{
    Outcome o;
    int runs = 0;
    int fails = 0;
    int inconclusive = 0;
    for (int m = 0; m < 10; ++m) {
        for (const auto& sizes : std::vector<std::vector<std::size_t>>{{4}, {2, 3}}) {
            const Dims dims(sizes);
            const auto N = dims.total();
            const Matrix A = random_gaussian_matrix(N, N, derive_seed(41, static_cast<std::uint64_t>(m * 10 + sizes.size())));
            for (Family fam : {Family::gaussian, Family::rademacher}) {
                const auto r = verify_decoupling(A, dims, DistributionSpec::make(fam), {2, 4},
                                                 mc(100000, derive_seed(42, static_cast<std::uint64_t>(runs))));
                ++runs;
                for (const auto& row : r.rows) {
                    fails += row.verdict == Verdict::fail;
                    inconclusive += row.verdict == Verdict::inconclusive_pass;
                }
            }
        }
    }
    o.ok = fails == 0;
    o.detail = "runs=" + std::to_string(runs) + " separated-violations=" + std::to_string(fails) +
               " inconclusive=" + std::to_string(inconclusive);
    return o;
}

Outcome sandwich()
{
    Outcome o;
    const Dims dims({3, 3});
    double lo = INFINITY;
    double hi = 0.0;
    double worst_spread = 0.0;
    std::vector<double> spread_by_p(3, 0.0);
    bool positive = true;
    for (int m = 0; m < 10; ++m) {
        const Matrix B = random_gaussian_matrix(9, 9, derive_seed(51, static_cast<std::uint64_t>(m)));
        const Matrix A = to_matrix(symmetrize(rearrange_matrix(B, dims)));
        const auto r = verify_main_lower(A, dims, {2, 4, 8}, mc(100000, derive_seed(52, static_cast<std::uint64_t>(m))), 3);
        for (const auto& row : r.rows) {
            positive = positive && row.ratio_low > 0.0;
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
        }
        for (std::size_t k = 0; k < r.spread.size(); ++k) {
            worst_spread = std::max(worst_spread, r.spread[k]);
            spread_by_p[k] = std::max(spread_by_p[k], r.spread[k]);
        }
    }
    o.ok = positive && lo > 0.0 && hi / lo <= 50.0 && worst_spread <= 0.15;
    o.detail = "r_lo=" + fmt(lo) + " r_hi=" + fmt(hi) + " r_hi/r_lo=" + fmt(hi / lo) +
               " max-seed-spread(p=2,4,8)=" + fmt(spread_by_p[0]) + "," + fmt(spread_by_p[1]) + "," +
               fmt(spread_by_p[2]) + " limit=0.15";
    return o;
}

bool within(const std::vector<double>& v, double tol, double& worst)
{
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    worst = 0.0;
    for (double x : v) {
        worst = std::max(worst, std::abs(x - mean) / mean);
    }
    return std::isfinite(mean) && mean > 0.0 && worst <= tol;
}

Outcome tails()
{
    Outcome o;
    const std::size_t S = 100000;
    bool dominated = true;

    const Matrix A = random_gaussian_matrix(2, 16, 61);
    const double s = Eigen::JacobiSVD<Matrix>(A).singularValues()[0];
    std::vector<double> t_ax;
    for (double f : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        t_ax.push_back(f * s);
    }
    std::vector<double> fitted_ax;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = verify_ax_tail(A, Dims({4, 4}), DistributionSpec::make(Family::gaussian), t_ax, mc(S, seed));
        for (const auto& row : r.rows) {
            dominated = dominated && row.empirical.frequency <= row.bound_fitted;
        }
        fitted_ax.push_back(r.fitted_C);
    }

    const std::size_t n = 8;
    const double F = std::sqrt(static_cast<double>(n));
    std::vector<double> t_hw;
    for (double f : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        t_hw.push_back(f * F);
    }
    std::vector<double> fitted_hw;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = verify_hanson_wright(Matrix::Identity(n, n), DistributionSpec::make(Family::gaussian), t_hw,
                                            mc(S, seed));
        for (const auto& row : r.rows) {
            dominated = dominated && row.empirical.frequency <= row.bound_fitted;
        }
        fitted_hw.push_back(r.fitted_c);
    }
    double w_ax = 0.0;
    double w_hw = 0.0;
    const bool stable_ax = within(fitted_ax, 0.2, w_ax);
    const bool stable_hw = within(fitted_hw, 0.2, w_hw);
    o.ok = dominated && stable_ax && stable_hw;
    o.detail = "dominated=" + std::string(dominated ? "yes" : "no") + " C_ax=" + fmt(fitted_ax[0]) + " spread=" +
               fmt(w_ax) + " c_hw=" + fmt(fitted_hw[0]) + " spread=" + fmt(w_hw);
    return o;
}

Outcome gaussian_decoupling()
{
    Outcome o;
    int fails = 0;
    double worst_exact = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Vector a = random_gaussian_matrix(8, 1, derive_seed(71, k)).col(0);
        const auto r = verify_gaussian_decoupling(a, {2, 4, 8}, mc(100000, derive_seed(72, k)));
        for (const auto& row : r.rows) {
            fails += row.verdict == Verdict::fail;
            if (row.p == 2.0) {
                if (!row.has_exact) {
                    ++fails;
                }
                worst_exact = std::max({worst_exact, row.lhs_rel_error, row.rhs_rel_error});
            }
        }
    }
    o.ok = fails == 0 && worst_exact <= 0.03;
    o.detail = "separated-violations=" + std::to_string(fails) + " max-rel-error(p=2 exact)=" + fmt(worst_exact);
    return o;
}

Outcome determinism()
{
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "kronchaos_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string matrix = (root / "a.csv").string();
    write_matrix_csv(matrix, random_gaussian_matrix(4, 4, 81));

    const std::vector<std::string> suites{"identities", "norms",         "decoupling",          "main-upper",
                                          "main-lower", "ax-tail",       "hanson-wright",       "gaussian-decoupling"};
    auto args_for = [&](const std::string& tag, const std::string& threads) {
        std::vector<std::string> a{"verify"};
        a.insert(a.end(), suites.begin(), suites.end());
        a.insert(a.end(), {"--matrix", matrix, "--dims", "2,2", "--samples", "10000", "--instances", "10", "--seed",
                           "7", "--threads", threads, "--cache", (root / ("cache" + tag)).string(), "--out",
                           (root / ("out" + tag)).string()});
        return a;
    };
    std::ostringstream sink;
    const int c1 = run_cli(args_for("1", "1"), sink, sink);
    const int c2 = run_cli(args_for("2", "2"), sink, sink);
    std::vector<std::string> bargs{"bounds", "--matrix", matrix, "--dims", "2,2", "--t", "0.5,1"};
    auto b1 = bargs;
    b1.insert(b1.end(), {"--cache", (root / "cache1").string(), "--out", (root / "out1").string()});
    auto b2 = bargs;
    b2.insert(b2.end(), {"--cache", (root / "cache2").string(), "--out", (root / "out2").string()});
    const int c3 = run_cli(b1, sink, sink);
    const int c4 = run_cli(b2, sink, sink);

    int same = 0;
    int compared = 0;
    auto names = suites;
    names.push_back("bounds");
    for (const auto& s : names) {
        const auto p1 = root / "out1" / (s + ".json");
        const auto p2 = root / "out2" / (s + ".json");
        ++compared;
        if (fs::exists(p1) && fs::exists(p2) && read_text_file(p1.string()) == read_text_file(p2.string())) {
            ++same;
        }
    }
    o.ok = c1 != exit_usage && c2 != exit_usage && c3 == exit_pass && c4 == exit_pass && same == compared;
    o.detail = "identical=" + std::to_string(same) + "/" + std::to_string(compared);
    if (!o.ok) {
        o.detail += " exit=" + std::to_string(c1) + "," + std::to_string(c2) + "," + std::to_string(c3) + "," +
                    std::to_string(c4) + " log: " + sink.str();
    }
    fs::remove_all(root);
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact identities", 30, identities},
        {2, "norm inequalities", 60, norms},
        {3, "analytic Monte Carlo anchors", 60, anchors},
        {4, "decoupling inequality", 180, decoupling},
        {5, "moment sandwich ratios", 180, sandwich},
        {6, "tail curves and fitted constants", 120, tails},
        {7, "gaussian square vs product", 60, gaussian_decoupling},
        {8, "byte-identical reports", 600, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = out.ok && secs <= c.budget_s;
        failed += !ok;
        std::cout << "criterion " << c.id << " [" << c.name << "]: " << (ok ? "PASS" : "FAIL") << "  (" << fmt(secs)
                  << " s) " << out.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
