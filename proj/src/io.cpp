#include "kronchaos/io.hpp"

#include "json.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kronchaos {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(trim(cur));
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

// strtod accepts decimal and hex-float text; the whole token must be consumed.
double parse_real(const std::string& token)
{
    if (token.empty()) {
        throw InputError("empty numeric field");
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
        throw InputError("not a number: '" + token + "'");
    }
    if (errno == ERANGE && std::isinf(v)) {
        throw InputError("number out of range: '" + token + "'");
    }
    if (!std::isfinite(v)) {
        throw InputError("non-finite value: '" + token + "'");
    }
    return v;
}

std::string hex_float(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

}  // namespace

Matrix parse_matrix_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        std::vector<double> row;
        for (const auto& field : split(t, ',')) {
            try {
                row.push_back(parse_real(field));
            } catch (const InputError& e) {
                throw InputError("line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                             " entries, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InputError("matrix CSV has no rows");
    }
    Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return A;
}

Matrix read_matrix_csv(const std::string& path)
{
    try {
        return parse_matrix_csv(read_text_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string format_matrix_csv(const Matrix& A)
{
    std::string out;
    char buf[40];
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", A(r, c));
            if (c > 0) {
                out += ',';
            }
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const std::string& path, const Matrix& A)
{
    write_text_file(path, format_matrix_csv(A));
}

std::string array_to_json(const TensorArray& B)
{
    nlohmann::ordered_json j;
    j["format"] = "kronchaos-array";
    j["version"] = 1;
    j["labels"] = B.labels();
    j["dims"] = B.shape();
    auto data = nlohmann::ordered_json::array();
    for (double v : B.data()) {
        data.push_back(hex_float(v));
    }
    j["data"] = std::move(data);
    return j.dump(1);
}

TensorArray array_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("array JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "kronchaos-array") {
        throw InputError("array JSON: missing format tag");
    }
    if (j.value("version", 0) != 1) {
        throw InputError("array JSON: unsupported version");
    }
    try {
        auto dims = j.at("dims").get<std::vector<std::size_t>>();
        AxisSet labels = j.contains("labels") ? j.at("labels").get<AxisSet>()
                                              : axis_range(1, static_cast<int>(dims.size()));
        std::vector<double> data;
        for (const auto& v : j.at("data")) {
            data.push_back(v.is_string() ? parse_real(v.get<std::string>()) : v.get<double>());
        }
        return TensorArray(std::move(labels), std::move(dims), std::move(data));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("array JSON: ") + e.what());
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(std::string("array JSON: ") + e.what());
    }
}

std::vector<std::size_t> parse_size_list(const std::string& text)
{
    std::vector<std::size_t> out;
    for (const auto& f : split(text, ',')) {
        if (f.empty() || f.find_first_not_of("0123456789") != std::string::npos) {
            throw InputError("bad size list entry '" + f + "' in '" + text + "'");
        }
        const auto v = std::stoull(f);
        if (v == 0) {
            throw InputError("size list entries must be >= 1");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) {
        throw InputError("empty size list");
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& f : split(text, ',')) {
        out.push_back(parse_real(f));
    }
    if (out.empty()) {
        throw InputError("empty number list");
    }
    return out;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    out << text;
    if (!out) {
        throw InputError("write failed for " + path);
    }
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace kronchaos
