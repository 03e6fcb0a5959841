#include "kronchaos/cli.hpp"

#include "kronchaos/io.hpp"
#include "kronchaos/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

namespace kronchaos {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> all_suites = {"identities",  "norms",       "decoupling",    "main-upper",
                                             "main-lower",  "ax-tail",     "hanson-wright", "gaussian-decoupling"};

constexpr std::uint64_t matrix_tag = 0x6d6174726978ULL;
constexpr std::uint64_t vector_tag = 0x766563746f72ULL;
constexpr std::uint64_t norm_tag = 0x6e6f726dULL;

struct Options {
    std::string matrix;
    std::string dims = "2,2";
    std::string dist = "gaussian";
    std::string p;
    std::string t;
    std::string vector;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    int restarts = 32;
    int replicates = 3;
    int instances = 0;
    std::size_t rows = 0;
    std::size_t length = 8;
    double L = 0.0;
    double C_upper = 1.0;
    double C_tail = 1.0;
    double c_hw = 1.0;
    std::string out_dir;
    std::string cache;
    std::string formats = "json,csv";
    bool force = false;
};

struct Outcome {
    Verdict verdict = Verdict::pass;
    Json result;
    std::string csv;
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

NormOptions norm_options(const Options& o)
{
    NormOptions n;
    n.restarts = o.restarts;
    n.threads = o.threads;
    n.seed = derive_seed(o.seed, norm_tag);
    return n;
}

MonteCarloOptions mc_options(const Options& o)
{
    return {o.samples, o.seed, o.threads};
}

Json knobs_json(const Options& o)
{
    Json k;
    k["C_upper"] = o.C_upper;
    k["C_tail"] = o.C_tail;
    k["c_hanson_wright"] = o.c_hw;
    k["L"] = o.L;
    return k;
}

std::vector<std::string> format_list(const Options& o)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : o.formats + ",") {
        if (c == ',') {
            if (cur == "json" || cur == "csv") {
                if (std::find(out.begin(), out.end(), cur) == out.end()) {
                    out.push_back(cur);
                }
            } else if (!cur.empty()) {
                throw UsageError("unknown format '" + cur + "' (json, csv)");
            }
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (out.empty()) {
        throw UsageError("no output format selected");
    }
    return out;
}

// Matrix from --matrix, or a seeded Gaussian one. The source goes into the
// config so cached reports key on the content.
std::pair<Matrix, Json> load_matrix(const Options& o, std::size_t rows, std::size_t cols)
{
    Json src;
    if (!o.matrix.empty()) {
        const auto text = read_text_file(o.matrix);
        Matrix A;
        try {
            A = parse_matrix_csv(text);
        } catch (const InputError& e) {
            throw InputError(o.matrix + ": " + e.what());
        }
        if (static_cast<std::size_t>(A.cols()) != cols || (rows != 0 && static_cast<std::size_t>(A.rows()) != rows)) {
            throw ShapeError(o.matrix + ": matrix is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                             ", dims need " + (rows ? std::to_string(rows) + "x" : std::string("")) +
                             std::to_string(cols) + (rows ? "" : " columns"));
        }
        src["source"] = "csv";
        src["path"] = o.matrix;
        src["content_hash"] = hex64(fnv1a(text));
        return {A, src};
    }
    const std::size_t r = rows ? rows : cols;
    const auto seed = derive_seed(o.seed, matrix_tag);
    src["source"] = "random";
    src["seed"] = seed;
    src["rows"] = r;
    src["cols"] = cols;
    return {random_gaussian_matrix(r, cols, seed), src};
}

std::vector<double> p_grid(const Options& o, const std::string& fallback)
{
    return parse_real_list(o.p.empty() ? fallback : o.p);
}

Json grid_json(const std::vector<double>& g)
{
    auto j = Json::array();
    for (double v : g) {
        j.push_back(v);
    }
    return j;
}

template <typename Report>
Outcome outcome_of(const Report& r)
{
    return {r.verdict, to_json(r), to_csv(r)};
}

// Config (hashed) and the computation for one suite.
struct Job {
    Json config;
    std::function<Outcome()> run;
};

Job make_job(const std::string& suite, const Options& o)
{
    Job job;
    Json& c = job.config;
    c["command"] = "verify";
    c["suite"] = suite;
    c["seed"] = o.seed;

    if (suite == "identities") {
        const int inst = o.instances > 0 ? o.instances : 100;
        c["instances"] = inst;
        job.run = [o, inst] { return outcome_of(run_identities(o.seed, inst)); };
        return job;
    }
    if (suite == "norms") {
        const int inst = o.instances > 0 ? o.instances : 50;
        c["instances"] = inst;
        c["als_restarts"] = o.restarts;
        job.run = [o, inst] { return outcome_of(run_norm_suite(o.seed, inst, norm_options(o))); };
        return job;
    }

    const auto dist = DistributionSpec::parse(o.dist);
    c["samples"] = o.samples;
    c["distribution"] = dist.name();
    c["psi2"] = dist.psi2;
    Options ko = o;
    ko.L = dist.effective_L();
    c["knobs"] = knobs_json(ko);

    if (suite == "gaussian-decoupling") {
        Vector a;
        Json src;
        if (!o.vector.empty()) {
            const auto text = read_text_file(o.vector);
            const Matrix m = parse_matrix_csv(text);
            a = Eigen::Map<const Vector>(m.data(), m.size());
            src["source"] = "csv";
            src["path"] = o.vector;
            src["content_hash"] = hex64(fnv1a(text));
        } else {
            const auto seed = derive_seed(o.seed, vector_tag);
            a = random_gaussian_matrix(o.length, 1, seed).col(0);
            src["source"] = "random";
            src["seed"] = seed;
            src["length"] = o.length;
        }
        const auto grid = p_grid(o, "2,4,8");
        c["distribution"] = "gaussian";
        c["psi2"] = DistributionSpec::make(Family::gaussian).psi2;
        c["vector"] = src;
        c["p_grid"] = grid_json(grid);
        job.run = [a, grid, o] { return outcome_of(verify_gaussian_decoupling(a, grid, mc_options(o))); };
        return job;
    }

    const Dims dims(parse_size_list(o.dims));
    const auto N = dims.total();
    c["dims"] = dims.sizes();

    if (suite == "decoupling") {
        auto [A, src] = load_matrix(o, N, N);
        const auto grid = p_grid(o, "2,4");
        c["matrix"] = src;
        c["p_grid"] = grid_json(grid);
        job.run = [A, dims, dist, grid, o] { return outcome_of(verify_decoupling(A, dims, dist, grid, mc_options(o))); };
        return job;
    }
    if (suite == "main-upper") {
        auto [A, src] = load_matrix(o, N, N);
        const auto grid = p_grid(o, "2,4,8");
        c["matrix"] = src;
        c["p_grid"] = grid_json(grid);
        c["als_restarts"] = o.restarts;
        job.run = [A, dims, dist, grid, o] {
            return outcome_of(verify_main_upper(A, dims, dist, grid, mc_options(o), o.C_upper, norm_options(o)));
        };
        return job;
    }
    if (suite == "main-lower") {
        if (dist.family != Family::gaussian) {
            throw UsageError("main-lower needs --dist gaussian (the lower bound is for Gaussian vectors)");
        }
        auto [A, src] = load_matrix(o, N, N);
        const auto grid = p_grid(o, "2,4,8");
        src["symmetrized"] = true;
        c["matrix"] = src;
        c["p_grid"] = grid_json(grid);
        c["replicates"] = o.replicates;
        c["als_restarts"] = o.restarts;
        const Matrix S = to_matrix(symmetrize(rearrange_matrix(A, dims)));
        job.run = [S, dims, grid, o] {
            return outcome_of(verify_main_lower(S, dims, grid, mc_options(o), o.replicates, norm_options(o)));
        };
        return job;
    }
    if (suite == "ax-tail") {
        if (!dims.all_equal()) {
            throw UsageError("ax-tail needs equal dims along every axis");
        }
        auto [A, src] = load_matrix(o, o.rows, N);
        std::vector<double> grid;
        if (o.t.empty()) {
            const double s = Eigen::BDCSVD<Matrix>(A).singularValues()[0];
            for (double f : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
                grid.push_back(f * s);
            }
        } else {
            grid = parse_real_list(o.t);
        }
        c["matrix"] = src;
        c["t_grid"] = grid_json(grid);
        job.run = [A, dims, dist, grid, o] {
            return outcome_of(verify_ax_tail(A, dims, dist, grid, mc_options(o), o.C_tail));
        };
        return job;
    }
    if (suite == "hanson-wright") {
        auto [A, src] = load_matrix(o, N, N);
        if (o.matrix.empty()) {
            A = (0.5 * (A + A.transpose())).eval();
            src["symmetric_part"] = true;
        }
        std::vector<double> grid;
        if (o.t.empty()) {
            const double f = A.norm();
            for (double k : {0.5, 1.0, 2.0, 3.0, 4.0}) {
                grid.push_back(k * f);
            }
        } else {
            grid = parse_real_list(o.t);
        }
        c["matrix"] = src;
        c["t_grid"] = grid_json(grid);
        job.run = [A, dist, grid, o] { return outcome_of(verify_hanson_wright(A, dist, grid, mc_options(o), o.c_hw)); };
        return job;
    }
    throw UsageError("unknown suite '" + suite + "'");
}

struct Stored {
    fs::path dir;
    bool reused = false;
    Verdict verdict = Verdict::pass;
};

Verdict parse_verdict(const std::string& s)
{
    for (auto v : {Verdict::pass, Verdict::inconclusive_pass, Verdict::fail, Verdict::skipped}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw InputError("unknown verdict '" + s + "'");
}

Json envelope(const Json& config, const std::string& hash, const Outcome& oc)
{
    Json r;
    r["format"] = "kronchaos-report";
    r["schema_version"] = report_schema_version;
    r["library_version"] = KRONCHAOS_VERSION;
    r["config_hash"] = hash;
    r["config"] = config;
    r["seed"] = config.contains("seed") ? config["seed"] : Json(nullptr);
    r["knobs"] = config.contains("knobs") ? config["knobs"] : Json::object();
    r["verdict"] = to_string(oc.verdict);
    r["result"] = oc.result;
    return r;
}

// Runs a job through the cache: an existing report for the same config hash
// is reused unless --force, and never overwritten.
Stored run_cached(const std::string& name, const Job& job, const Options& o, std::ostream& err)
{
    const auto formats = format_list(o);
    const std::string config_text = job.config.dump();
    const auto hash = hex64(fnv1a(config_text));
    const fs::path cache = o.cache.empty() ? fs::path(default_cache_dir()) : fs::path(o.cache);
    Stored st;
    st.dir = cache / hash;
    const auto report_path = st.dir / "report.json";

    std::optional<Outcome> oc;
    std::string text;
    if (!o.force && fs::exists(report_path)) {
        try {
            text = read_text_file(report_path.string());
            const auto j = Json::parse(text);
            st.verdict = parse_verdict(j.at("verdict").get<std::string>());
            st.reused = true;
        } catch (const std::exception& e) {
            err << "warning: unreadable cached report " << report_path.string() << " (" << e.what()
                << "); recomputing without caching\n";
        }
    }
    if (!st.reused) {
        oc = job.run();
        st.verdict = oc->verdict;
        text = envelope(job.config, hash, *oc).dump(2) + "\n";
        std::error_code ec;
        fs::create_directories(st.dir, ec);
        if (ec) {
            throw InputError("cannot create cache directory " + st.dir.string() + ": " + ec.message());
        }
        if (fs::exists(report_path)) {
            if (read_text_file(report_path.string()) != text) {
                err << "warning: recomputed report differs from the cached one in " << st.dir.string()
                    << "; cached copy kept\n";
            }
        } else {
            write_text_file(report_path.string(), text);
            write_text_file((st.dir / "report.csv").string(), oc->csv);
            Json meta;
            meta["config_hash"] = hash;
            meta["created_utc"] = utc_now();
            write_text_file((st.dir / "meta.json").string(), meta.dump(2) + "\n");
        }
    }
    if (!o.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(o.out_dir, ec);
        if (ec) {
            throw InputError("cannot create output directory " + o.out_dir + ": " + ec.message());
        }
        for (const auto& f : formats) {
            const auto src = st.dir / ("report." + f);
            if (fs::exists(src)) {
                fs::copy_file(src, fs::path(o.out_dir) / (name + "." + f), fs::copy_options::overwrite_existing);
            }
        }
    }
    return st;
}

int exit_code(Verdict v)
{
    return v == Verdict::fail ? exit_violation : exit_pass;
}

int cmd_bounds(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.matrix.empty()) {
        throw UsageError("bounds needs --matrix");
    }
    const Dims dims(parse_size_list(o.dims));
    auto [A, src] = load_matrix(o, 0, dims.total());
    const auto grid = p_grid(o, "2,4,8");
    const auto tgrid = o.t.empty() ? std::vector<double>{} : parse_real_list(o.t);
    const double L = o.L > 0.0 ? o.L : DistributionSpec::parse(o.dist).effective_L();
    Job job;
    job.config["command"] = "bounds";
    job.config["seed"] = o.seed;
    job.config["matrix"] = src;
    job.config["dims"] = dims.sizes();
    job.config["distribution"] = DistributionSpec::parse(o.dist).name();
    job.config["p_grid"] = grid_json(grid);
    job.config["t_grid"] = grid_json(tgrid);
    job.config["als_restarts"] = o.restarts;
    Options ko = o;
    ko.L = L;
    job.config["knobs"] = knobs_json(ko);
    job.run = [A = A, dims, grid, tgrid, L, o] {
        const auto rep = make_bound_report(A, dims, grid, tgrid, L, o.C_tail, norm_options(o));
        Outcome oc;
        oc.result = to_json(rep);
        oc.csv = to_csv(rep);
        return oc;
    };
    const auto st = run_cached("bounds", job, o, err);
    const auto j = Json::parse(read_text_file((st.dir / "report.json").string()));
    for (const auto& w : j["result"]["warnings"]) {
        err << "warning: " << w.get<std::string>() << "\n";
    }
    for (const auto& row : j["result"]["moments"]) {
        out << "p=" << row["p"].dump() << "  m_p=" << row["mp_main"].dump() << "  m_p(norm)=" << row["mp_norm"].dump()
            << "\n";
    }
    out << "report: " << (st.dir / "report.json").string() << (st.reused ? " (cached)" : "") << "\n";
    return exit_pass;
}

int cmd_verify(std::vector<std::string> suites, const Options& o, std::ostream& out, std::ostream& err)
{
    if (std::find(suites.begin(), suites.end(), "all") != suites.end()) {
        suites = all_suites;
    }
    for (const auto& s : suites) {
        if (std::find(all_suites.begin(), all_suites.end(), s) == all_suites.end()) {
            throw UsageError("unknown suite '" + s + "'");
        }
    }
    // Build every job first so that usage errors surface before any compute.
    std::vector<Job> jobs;
    for (const auto& s : suites) {
        jobs.push_back(make_job(s, o));
    }
    Verdict overall = Verdict::pass;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const auto st = run_cached(suites[k], jobs[k], o, err);
        overall = combine(overall, st.verdict);
        out << suites[k] << ": " << to_string(st.verdict) << "  (" << (st.dir / "report.json").string()
            << (st.reused ? ", cached" : "") << ")\n";
    }
    return exit_code(overall);
}

struct SummaryRow {
    std::string created;
    std::string hash;
    std::string kind;
    std::string seed;
    std::string verdict;
    std::string calibration;
};

std::string calibration_text(const Json& result)
{
    std::string out;
    auto add = [&](const char* key, const char* label) {
        if (result.contains(key) && !result[key].is_null()) {
            out += (out.empty() ? "" : " ") + std::string(label) + "=" + result[key].dump();
        }
    };
    add("fitted_C", "C");
    add("fitted_c", "c");
    add("max_ratio", "max_ratio");
    add("min_ratio", "min_ratio");
    return out.empty() ? "-" : out;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err)
{
    const fs::path cache = o.cache.empty() ? fs::path(default_cache_dir()) : fs::path(o.cache);
    std::vector<SummaryRow> rows;
    if (fs::is_directory(cache)) {
        std::vector<fs::path> dirs;
        for (const auto& e : fs::directory_iterator(cache)) {
            if (e.is_directory()) {
                dirs.push_back(e.path());
            }
        }
        std::sort(dirs.begin(), dirs.end());
        for (const auto& dir : dirs) {
            try {
                const auto j = Json::parse(read_text_file((dir / "report.json").string()));
                if (j.at("format").get<std::string>() != "kronchaos-report") {
                    throw InputError("not a report");
                }
                SummaryRow r;
                r.hash = j.at("config_hash").get<std::string>();
                const auto& c = j.at("config");
                r.kind = c.at("command").get<std::string>();
                if (c.contains("suite")) {
                    r.kind += " " + c["suite"].get<std::string>();
                }
                r.seed = j.at("seed").dump();
                r.verdict = j.at("verdict").get<std::string>();
                r.calibration = calibration_text(j.at("result"));
                r.created = "-";
                try {
                    const auto meta = Json::parse(read_text_file((dir / "meta.json").string()));
                    r.created = meta.at("created_utc").get<std::string>();
                } catch (const std::exception&) {
                }
                rows.push_back(std::move(r));
            } catch (const std::exception& e) {
                err << "warning: skipping cache entry " << dir.filename().string() << ": " << e.what() << "\n";
            }
        }
    }
    if (rows.empty()) {
        err << "error: no cached reports in " << cache.string() << "\n";
        return exit_usage;
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        return a.created < b.created;
    });
    std::size_t wk = 4;
    for (const auto& r : rows) {
        wk = std::max(wk, r.kind.size());
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    out << pad("created", 21) << pad("config", 17) << pad("kind", wk + 1) << pad("seed", 21) << pad("verdict", 18)
        << "calibration\n";
    for (const auto& r : rows) {
        out << pad(r.created, 21) << pad(r.hash, 17) << pad(r.kind, wk + 1) << pad(r.seed, 21) << pad(r.verdict, 18)
            << r.calibration << "\n";
    }
    return exit_pass;
}

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--cache", o.cache, "Cache directory (default $KRONCHAOS_CACHE_DIR or ./kronchaos-cache)");
}

void add_compute(CLI::App* cmd, Options& o)
{
    add_common(cmd, o);
    cmd->add_option("--matrix", o.matrix, "Matrix CSV, one row per line");
    cmd->add_option("--dims", o.dims, "Axis sizes, comma separated")->capture_default_str();
    cmd->add_option("--dist", o.dist, "gaussian, rademacher, uniform_sym or two_point:<q>")->capture_default_str();
    cmd->add_option("--p", o.p, "Moment orders, comma separated");
    cmd->add_option("--t", o.t, "Tail thresholds, comma separated");
    cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));
    cmd->add_option("--restarts", o.restarts, "ALS restarts per norm")->capture_default_str()->check(CLI::Range(1, 100000));
    cmd->add_option("--C-tail", o.C_tail, "Constant in the tail bound")->capture_default_str();
    cmd->add_option("--out", o.out_dir, "Also copy reports into this directory");
    cmd->add_option("--format", o.formats, "Output formats for --out: json, csv")->capture_default_str();
    cmd->add_flag("--force", o.force, "Recompute even when a cached report exists");
}

}  // namespace

std::string default_cache_dir()
{
    const char* env = std::getenv("KRONCHAOS_CACHE_DIR");
    return env && *env ? env : "kronchaos-cache";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Moment and tail bounds for Kronecker-structured chaos, with Monte Carlo checks", "kronchaos"};
    app.set_version_flag("--version", std::string(KRONCHAOS_VERSION));
    app.require_subcommand(1);
    Options o;

    auto* bounds = app.add_subcommand("bounds", "Norm tables, m_p values and tail bounds for one matrix");
    add_compute(bounds, o);
    bounds->add_option("--L", o.L, "Subgaussian constant (default from --dist)");

    std::vector<std::string> suites;
    auto* verify = app.add_subcommand("verify", "Run verification suites");
    verify->add_option("suite", suites, "identities, norms, decoupling, main-upper, main-lower, ax-tail, "
                                        "hanson-wright, gaussian-decoupling, or all")
        ->required();
    add_compute(verify, o);
    verify->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str()->check(CLI::Range(
        std::size_t{1}, std::size_t{100000000}));
    verify->add_option("--replicates", o.replicates, "Seeds for main-lower")->capture_default_str()->check(
        CLI::Range(1, 100));
    verify->add_option("--instances", o.instances, "Random instances for identities / norms");
    verify->add_option("--rows", o.rows, "Rows of the random matrix for ax-tail");
    verify->add_option("--vector", o.vector, "Coefficient CSV for gaussian-decoupling");
    verify->add_option("--length", o.length, "Length of the random coefficient vector")->capture_default_str();
    verify->add_option("--C-upper", o.C_upper, "Ceiling on L_p / m_p in main-upper")->capture_default_str();
    verify->add_option("--c-hw", o.c_hw, "Constant in the Hanson-Wright envelope")->capture_default_str();

    auto* report = app.add_subcommand("report", "Summarize cached reports");
    add_common(report, o);

    std::vector<const char*> argv{"kronchaos"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (*bounds) {
            return cmd_bounds(o, out, err);
        }
        if (*verify) {
            return cmd_verify(suites, o, out, err);
        }
        return cmd_report(o, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace kronchaos
