#include "kronchaos/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kronchaos {

namespace {

Json num(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

std::string cell(double v)
{
    if (!std::isfinite(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json string_list(const std::vector<std::string>& v)
{
    auto out = Json::array();
    for (const auto& s : v) {
        out.push_back(s);
    }
    return out;
}

// Shared CSV writer: header then rows, comma separated.
class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header)
    {
        bool first = true;
        for (const char* h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    Csv& operator<<(const std::string& s)
    {
        sep();
        // Axis sets and partitions contain commas.
        if (s.find(',') != std::string::npos) {
            out_ << '"' << s << '"';
        } else {
            out_ << s;
        }
        return *this;
    }
    Csv& operator<<(double v) { return *this << cell(v); }
    Csv& operator<<(std::size_t v) { return *this << std::to_string(v); }
    Csv& operator<<(int v) { return *this << std::to_string(v); }

    void end()
    {
        out_ << '\n';
        fresh_ = true;
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    void sep()
    {
        if (!fresh_) {
            out_ << ',';
        }
        fresh_ = false;
    }

    std::ostringstream out_;
    bool fresh_ = true;
};

Json tail_row_json(const TailRow& r)
{
    Json j = to_json(r.empirical);
    j["bound_fitted"] = num(r.bound_fitted);
    j["bound_knob"] = num(r.bound_knob);
    return j;
}

Json ratio_row_json(const RatioRow& r)
{
    Json j;
    j["p"] = r.p;
    j["seed"] = r.seed;
    j["empirical"] = to_json(r.empirical);
    j["mp"] = num(r.mp);
    j["ratio"] = num(r.ratio);
    j["ratio_low"] = num(r.ratio_low);
    j["ratio_high"] = num(r.ratio_high);
    return j;
}

void ratio_csv(Csv& csv, const RatioRow& r)
{
    csv << r.p << std::to_string(r.seed) << r.empirical.estimate << r.empirical.ci_low << r.empirical.ci_high << r.mp
        << r.ratio << r.ratio_low << r.ratio_high;
    csv.end();
}

void tail_csv(Csv& csv, const TailRow& r)
{
    csv << r.empirical.t << r.empirical.frequency << r.empirical.ci_low << r.empirical.ci_high << r.empirical.exceed
        << r.empirical.samples << r.bound_fitted << r.bound_knob;
    csv.end();
}

}  // namespace

std::string axis_set_text(const AxisSet& s)
{
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out += (k ? "," : "") + std::to_string(s[k]);
    }
    return out + "}";
}

Json to_json(const NormEstimate& e)
{
    Json j;
    j["value"] = num(e.value);
    j["method"] = to_string(e.method);
    j["exact"] = e.exact();
    j["converged"] = e.converged;
    j["restarts_used"] = e.restarts_used;
    if (!e.warning.empty()) {
        j["warning"] = e.warning;
    }
    return j;
}

Json to_json(const NormTable& t)
{
    Json j;
    j["d"] = t.d;
    j["max_kappa"] = t.max_kappa;
    auto sums = Json::array();
    for (double s : kappa_sums(t)) {
        sums.push_back(num(s));
    }
    j["kappa_sums"] = std::move(sums);
    j["has_lower_bounds"] = t.has_lower_bounds();
    auto terms = Json::array();
    for (const auto& term : t.terms) {
        Json r;
        r["I"] = term.I;
        r["partition"] = term.partition.to_string();
        r["kappa"] = term.kappa();
        r["norm"] = to_json(term.norm);
        terms.push_back(std::move(r));
    }
    j["terms"] = std::move(terms);
    return j;
}

Json to_json(const EmpiricalMoment& m)
{
    Json j;
    j["p"] = m.p;
    j["estimate"] = num(m.estimate);
    j["ci_low"] = num(m.ci_low);
    j["ci_high"] = num(m.ci_high);
    j["samples"] = m.samples;
    return j;
}

Json to_json(const TailFrequency& f)
{
    Json j;
    j["t"] = f.t;
    j["frequency"] = f.frequency;
    j["ci_low"] = f.ci_low;
    j["ci_high"] = f.ci_high;
    j["exceed"] = f.exceed;
    j["samples"] = f.samples;
    return j;
}

Json to_json(const BoundReport& r)
{
    Json j;
    j["dims"] = r.dims;
    j["L"] = r.L;
    j["C_tail"] = r.C_tail;
    j["main_table"] = r.has_main_table ? to_json(r.main_table) : Json(nullptr);
    j["gram_table"] = r.has_gram_table ? to_json(r.gram_table) : Json(nullptr);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        Json x;
        x["p"] = row.p;
        x["mp_main"] = row.has_main ? num(row.mp_main) : Json(nullptr);
        auto k = Json::array();
        for (double v : row.mp_kappa) {
            k.push_back(num(v));
        }
        x["mp_kappa"] = std::move(k);
        x["mp_norm"] = row.has_norm ? num(row.mp_norm) : Json(nullptr);
        rows.push_back(std::move(x));
    }
    j["moments"] = std::move(rows);
    auto tails = Json::array();
    for (const auto& t : r.tails) {
        Json x;
        x["t"] = t.t;
        x["bound"] = num(t.bound.value);
        x["regimes"] = t.bound.regimes;
        auto ev = Json::array();
        for (const auto& [reg, v] : t.bound.evaluated) {
            ev.push_back(Json{{"regime", reg}, {"value", num(v)}});
        }
        x["evaluated"] = std::move(ev);
        tails.push_back(std::move(x));
    }
    j["tail"] = std::move(tails);
    j["warnings"] = string_list(r.warnings);
    j["notes"] = string_list(r.notes);
    return j;
}

Json to_json(const DecouplingReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["detail"] = r.detail;
    auto terms = Json::array();
    for (const auto& t : r.terms) {
        Json x;
        x["I"] = t.I;
        x["J"] = t.J;
        x["weight"] = t.weight;
        auto m = Json::array();
        for (const auto& e : t.moments) {
            m.push_back(to_json(e));
        }
        x["moments"] = std::move(m);
        terms.push_back(std::move(x));
    }
    j["terms"] = std::move(terms);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        Json x;
        x["p"] = row.p;
        x["lhs"] = to_json(row.lhs);
        x["rhs"] = num(row.rhs);
        x["rhs_low"] = num(row.rhs_low);
        x["rhs_high"] = num(row.rhs_high);
        x["verdict"] = to_string(row.verdict);
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const MainUpperReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["detail"] = r.detail;
    j["L"] = r.L;
    j["ceiling"] = r.ceiling;
    j["max_ratio"] = num(r.max_ratio);
    j["mp_has_lower_bounds"] = r.mp_has_lower_bounds;
    j["warnings"] = string_list(r.warnings);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(ratio_row_json(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const MainLowerReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["detail"] = r.detail;
    j["seeds"] = r.seeds;
    j["min_ratio"] = num(r.min_ratio);
    j["max_ratio"] = num(r.max_ratio);
    auto spread = Json::array();
    for (double s : r.spread) {
        spread.push_back(num(s));
    }
    j["spread"] = std::move(spread);
    j["stability_tolerance"] = r.stability_tolerance;
    j["stable"] = r.stable;
    j["mp_has_lower_bounds"] = r.mp_has_lower_bounds;
    j["warnings"] = string_list(r.warnings);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(ratio_row_json(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const AxTailReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["detail"] = r.detail;
    j["knob_C"] = r.knob_C;
    j["fitted_C"] = num(r.fitted_C);
    j["monotone"] = r.monotone;
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(tail_row_json(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const HansonWrightReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["detail"] = r.detail;
    j["K"] = r.K;
    j["knob_c"] = r.knob_c;
    j["fitted_c"] = num(r.fitted_c);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(tail_row_json(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const GaussianDecouplingReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["detail"] = r.detail;
    j["exact_tolerance"] = r.exact_tolerance;
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        Json x;
        x["p"] = row.p;
        x["lhs"] = to_json(row.lhs);
        x["rhs"] = to_json(row.rhs);
        x["verdict"] = to_string(row.verdict);
        if (row.has_exact) {
            x["exact_lhs"] = row.exact_lhs;
            x["exact_rhs"] = row.exact_rhs;
            x["lhs_rel_error"] = row.lhs_rel_error;
            x["rhs_rel_error"] = row.rhs_rel_error;
        }
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const IdentitiesReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        Json x;
        x["name"] = row.name;
        x["instances"] = row.instances;
        x["max_rel_error"] = num(row.max_rel_error);
        x["tolerance"] = row.tolerance;
        x["verdict"] = to_string(row.verdict);
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const NormsReport& r)
{
    Json j;
    j["verdict"] = to_string(r.verdict);
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        Json x;
        x["name"] = row.name;
        x["instances"] = row.instances;
        x["passed"] = row.passed;
        x["inconclusive"] = row.inconclusive;
        x["failed"] = row.failed;
        x["max_error"] = num(row.max_error);
        x["tolerance"] = row.tolerance;
        x["verdict"] = to_string(row.verdict);
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    return j;
}

std::string to_csv(const BoundReport& r)
{
    Csv csv{"table", "I", "partition", "kappa", "method", "value"};
    auto emit = [&](const char* name, const NormTable& t) {
        for (const auto& term : t.terms) {
            csv << std::string(name) << axis_set_text(term.I) << term.partition.to_string() << term.kappa()
                << to_string(term.norm.method) << term.norm.value;
            csv.end();
        }
    };
    if (r.has_main_table) {
        emit("chaos", r.main_table);
    }
    if (r.has_gram_table) {
        emit("gram", r.gram_table);
    }
    return csv.str();
}

std::string to_csv(const DecouplingReport& r)
{
    Csv csv{"p", "lhs", "lhs_low", "lhs_high", "rhs", "rhs_low", "rhs_high", "verdict"};
    for (const auto& row : r.rows) {
        csv << row.p << row.lhs.estimate << row.lhs.ci_low << row.lhs.ci_high << row.rhs << row.rhs_low
            << row.rhs_high << to_string(row.verdict);
        csv.end();
    }
    return csv.str();
}

std::string to_csv(const MainUpperReport& r)
{
    Csv csv{"p", "seed", "empirical", "emp_low", "emp_high", "mp", "ratio", "ratio_low", "ratio_high"};
    for (const auto& row : r.rows) {
        ratio_csv(csv, row);
    }
    return csv.str();
}

std::string to_csv(const MainLowerReport& r)
{
    Csv csv{"p", "seed", "empirical", "emp_low", "emp_high", "mp", "ratio", "ratio_low", "ratio_high"};
    for (const auto& row : r.rows) {
        ratio_csv(csv, row);
    }
    return csv.str();
}

std::string to_csv(const AxTailReport& r)
{
    Csv csv{"t", "frequency", "freq_low", "freq_high", "exceed", "samples", "bound_fitted", "bound_knob"};
    for (const auto& row : r.rows) {
        tail_csv(csv, row);
    }
    return csv.str();
}

std::string to_csv(const HansonWrightReport& r)
{
    Csv csv{"t", "frequency", "freq_low", "freq_high", "exceed", "samples", "bound_fitted", "bound_knob"};
    for (const auto& row : r.rows) {
        tail_csv(csv, row);
    }
    return csv.str();
}

std::string to_csv(const GaussianDecouplingReport& r)
{
    Csv csv{"p", "lhs", "lhs_low", "lhs_high", "rhs", "rhs_low", "rhs_high", "verdict"};
    for (const auto& row : r.rows) {
        csv << row.p << row.lhs.estimate << row.lhs.ci_low << row.lhs.ci_high << row.rhs.estimate << row.rhs.ci_low
            << row.rhs.ci_high << to_string(row.verdict);
        csv.end();
    }
    return csv.str();
}

std::string to_csv(const IdentitiesReport& r)
{
    Csv csv{"name", "instances", "max_rel_error", "tolerance", "verdict"};
    for (const auto& row : r.rows) {
        csv << row.name << row.instances << row.max_rel_error << row.tolerance << to_string(row.verdict);
        csv.end();
    }
    return csv.str();
}

std::string to_csv(const NormsReport& r)
{
    Csv csv{"name", "instances", "passed", "inconclusive", "failed", "max_error", "tolerance", "verdict"};
    for (const auto& row : r.rows) {
        csv << row.name << row.instances << row.passed << row.inconclusive << row.failed << row.max_error
            << row.tolerance << to_string(row.verdict);
        csv.end();
    }
    return csv.str();
}

}  // namespace kronchaos
