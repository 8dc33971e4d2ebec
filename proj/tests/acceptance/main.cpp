// One pass/fail line per criterion; exit status 1 if any selected criterion fails.

#include "cylflow/acceptance.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> only;
    app.add_option("--only", only, "criterion, number or group (repeatable)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    return cylflow::run_acceptance(only, std::cout) == 0 ? 0 : 1;
}
