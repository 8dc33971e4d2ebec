#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cylflow {

// `key = value` lines, `#` comments, dotted keys. Every failure is a config-parse error
// naming the source line or the field.
class ExperimentConfig {
public:
    static ExperimentConfig parse(const std::string& text, const std::string& source = "<config>");
    static ExperimentConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    const std::string& scenario() const { return scenario_; }
    unsigned long long seed() const { return seed_; }
    void set_seed(unsigned long long s);

    // keys never read by the scenario; reported as unknown fields
    std::vector<std::string> unused() const;
    void check_unused() const;

    // FNV-1a over the sorted key=value lines
    std::uint64_t hash() const;
    std::string hash_hex() const;

    // config-parse error naming the field and its line
    [[noreturn]] void field_error(const std::string& key, const std::string& what) const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    mutable std::set<std::string> used_;
    std::string source_;
    std::string scenario_;
    unsigned long long seed_ = 1;

    const std::string* find(const std::string& key) const;
};

const std::vector<std::string>& scenario_names();

} // namespace cylflow
