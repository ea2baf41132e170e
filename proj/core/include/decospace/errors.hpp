#pragma once

#include <stdexcept>
#include <string>

namespace decospace {

// Every failure carries the originating module and the violated invariant so
// the CLI can map it to an exit code and a useful message.
class error : public std::runtime_error {
public:
    error(std::string module, std::string invariant, const std::string& what)
        : std::runtime_error(module + "/" + invariant + ": " + what),
          module_(std::move(module)), invariant_(std::move(invariant)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string module_;
    std::string invariant_;
};

// Bad or inconsistent user input (exit code 2).
class config_error : public error {
    using error::error;
};

// Numeric guard tripped: the requested computation would be untrustworthy
// (exit code 3).
class numeric_guard_error : public error {
    using error::error;
};

class aliasing_error : public numeric_guard_error {
    using numeric_guard_error::numeric_guard_error;
};

class lattice_error : public numeric_guard_error {
    using numeric_guard_error::numeric_guard_error;
};

class no_contraction_error : public numeric_guard_error {
    using numeric_guard_error::numeric_guard_error;
};

// A verified invariant failed at runtime (exit code 1).
class invariant_failure : public error {
    using error::error;
};

} // namespace decospace
