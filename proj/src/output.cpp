#include "cylflow/output.hpp"

#include "cylflow/error.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cylflow {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(const nlohmann::json& j, int indent, int depth, std::string& out)
{
    const std::string pad = indent > 0 ? "\n" + std::string(std::size_t(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(std::size_t(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += pad + nlohmann::json(it.key()).dump() + sep;
            emit(it.value(), indent, depth + 1, out);
        }
        out += close + '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += ',';
            first = false;
            out += pad;
            emit(e, indent, depth + 1, out);
        }
        out += close + ']';
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double v = j.get<double>();
        // JSON has no nan/inf literals
        out += std::isfinite(v) ? format_number(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace

std::string dump_json(const nlohmann::json& j, int indent)
{
    std::string out;
    emit(j, indent, 0, out);
    return out;
}

OutputWriter::OutputWriter(std::string dir, std::string config_hash, unsigned long long seed, std::string scenario)
    : dir_(std::move(dir)), hash_(std::move(config_hash)), scenario_(std::move(scenario)), seed_(seed)
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail("io-error", "cannot create " + dir_ + ": " + ec.message());
}

std::string OutputWriter::header() const
{
    return "# config_hash=" + hash_ + " seed=" + std::to_string(seed_) + " scenario=" + scenario_;
}

std::string OutputWriter::open_path(const std::string& name) const
{
    return (std::filesystem::path(dir_) / name).string();
}

std::string OutputWriter::csv(const std::string& name, const std::vector<std::string>& columns,
                              const std::vector<std::vector<double>>& rows) const
{
    const std::string path = open_path(name);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io-error", "cannot write " + path);
    out << header() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
        out << '\n';
    }
    return path;
}

std::string OutputWriter::dat(const std::string& name, const std::vector<double>& x, const std::vector<double>& y) const
{
    if (x.size() != y.size()) fail("io-error", "dat columns differ in length");
    const std::string path = open_path(name);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io-error", "cannot write " + path);
    out << header() << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) out << format_number(x[i]) << ' ' << format_number(y[i]) << '\n';
    return path;
}

std::string OutputWriter::json(const std::string& name, nlohmann::json body) const
{
    const std::string path = open_path(name);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io-error", "cannot write " + path);
    body["meta"] = {{"config_hash", hash_}, {"seed", seed_}, {"scenario", scenario_}};
    out << dump_json(body) << '\n';
    return path;
}

} // namespace cylflow
