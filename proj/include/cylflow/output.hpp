#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace cylflow {

// 17 significant digits, "nan"/"inf" spelled out
std::string format_number(double v);
// nlohmann::json text with every floating-point value in 17-digit form
std::string dump_json(const nlohmann::json& j, int indent = 2);

// Writes the artifacts of one run into `dir`. Text files start with
// "# config_hash=<hex> seed=<n> scenario=<name>"; JSON carries the same under "meta".
class OutputWriter {
public:
    OutputWriter(std::string dir, std::string config_hash, unsigned long long seed, std::string scenario);

    std::string csv(const std::string& name, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows) const;
    std::string dat(const std::string& name, const std::vector<double>& x, const std::vector<double>& y) const;
    std::string json(const std::string& name, nlohmann::json body) const;

    const std::string& dir() const { return dir_; }
    std::string header() const;

private:
    std::string dir_, hash_, scenario_;
    unsigned long long seed_;
    std::string open_path(const std::string& name) const;
};

} // namespace cylflow
