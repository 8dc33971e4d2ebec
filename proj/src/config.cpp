#include "cylflow/config.hpp"

#include "cylflow/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cylflow {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k)
{
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const char c = k[i];
        if (c == '.' && k[i - 1] == '.') return false;
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
    }
    return true;
}

} // namespace

const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names = {"spectrum",  "flow",      "normalform", "semigroup",
                                                   "centering", "genericity", "stability",  "aag",
                                                   "marriage-ring", "arrival-time"};
    return names;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source)
{
    ExperimentConfig c;
    c.source_ = source;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(no) + ": ";
        if (eq == std::string::npos) fail("config-parse", where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!valid_key(key)) fail("config-parse", where + "invalid key '" + key + "'");
        if (value.empty()) fail("config-parse", where + "field '" + key + "' has no value");
        if (c.values_.count(key)) fail("config-parse", where + "field '" + key + "' repeated");
        c.values_[key] = value;
        c.lines_[key] = no;
    }
    if (!c.has("scenario")) fail("config-parse", source + ": missing field 'scenario'");
    c.scenario_ = c.require_string("scenario");
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario_) == names.end())
        c.field_error("scenario", "unknown scenario '" + c.scenario_ + "'");
    c.seed_ = static_cast<unsigned long long>(c.get_int("seed", 1));
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail("config-parse", path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    values_[key] = value;
    lines_.erase(key);
}

void ExperimentConfig::set_seed(unsigned long long s)
{
    seed_ = s;
    set("seed", std::to_string(s));
    used_.insert("seed");
}

const std::string* ExperimentConfig::find(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
}

void ExperimentConfig::field_error(const std::string& key, const std::string& what) const
{
    const auto it = lines_.find(key);
    const std::string where = it != lines_.end() ? source_ + ":" + std::to_string(it->second) : source_;
    fail("config-parse", where + ": field '" + key + "': " + what);
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const
{
    const std::string* v = find(key);
    return v ? *v : fallback;
}

std::string ExperimentConfig::require_string(const std::string& key) const
{
    const std::string* v = find(key);
    if (!v) fail("config-parse", source_ + ": missing field '" + key + "'");
    return *v;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const
{
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const double d = std::stod(*v, &pos);
        if (pos == v->size()) return d;
    } catch (const std::exception&) {
    }
    field_error(key, "expected a number, got '" + *v + "'");
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const
{
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(*v, &pos);
        if (pos == v->size()) return d;
    } catch (const std::exception&) {
    }
    field_error(key, "expected an integer, got '" + *v + "'");
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const
{
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    field_error(key, "expected true or false, got '" + *v + "'");
}

std::vector<double> ExperimentConfig::get_list(const std::string& key, const std::vector<double>& fallback) const
{
    const std::string* v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream ss(*v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            field_error(key, "expected a comma-separated list of numbers");
        }
    }
    if (out.empty()) field_error(key, "empty list");
    return out;
}

std::vector<std::string> ExperimentConfig::unused() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

void ExperimentConfig::check_unused() const
{
    const auto u = unused();
    if (!u.empty()) field_error(u.front(), "unknown field for scenario '" + scenario_ + "'");
}

std::uint64_t ExperimentConfig::hash() const
{
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : values_) {
        if (k == "output.dir") continue;   // where results go does not change them
        const std::string line = k + "=" + v + "\n";
        for (unsigned char ch : line) {
            h ^= ch;
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string ExperimentConfig::hash_hex() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

} // namespace cylflow
