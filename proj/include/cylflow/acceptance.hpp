#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cylflow {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;   // runtime limit in seconds, part of the pass condition
};

// the fourteen criteria in order
const std::vector<std::string>& criterion_names();

// Expands group aliases ("spectral", "rotational", ...), numbers and hyphenated spellings.
// Names that match nothing are returned through `unknown`. Empty `only` selects everything.
std::vector<std::string> select_criteria(const std::vector<std::string>& only, std::vector<std::string>& unknown);

// never throws; a module error is a failure with the error text as detail
CriterionResult run_criterion(const std::string& name);

std::string format_result(const CriterionResult& r);

// one line per selected criterion, skipped-unknown lines for unknown names; returns the number of failures
int run_acceptance(const std::vector<std::string>& only, std::ostream& out);

} // namespace cylflow
