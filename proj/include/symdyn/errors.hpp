#ifndef SYMDYN_ERRORS_HPP
#define SYMDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace symdyn {

// Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
// NumericalError -> 4. Library code throws, the CLI translates.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace symdyn

#endif  // SYMDYN_ERRORS_HPP
