#pragma once

#include <stdexcept>
#include <string>

namespace cylflow {

// Every library failure carries a stable kebab-case name (e.g. "pivot-too-small")
// so the CLI and the bindings can report it verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& detail)
        : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

[[noreturn]] inline void fail(const std::string& name, const std::string& detail)
{
    throw Error(name, detail);
}

} // namespace cylflow
