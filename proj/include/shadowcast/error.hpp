#ifndef SHADOWCAST_ERROR_HPP
#define SHADOWCAST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace shadowcast {

// CLI exit codes: 0 success, 2 config/validation, 3 runtime/numeric, 4 I/O.
enum class ExitCode : int { ok = 0, config = 2, runtime = 3, io = 4 };

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IngestError : std::runtime_error {
    explicit IngestError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a kernel op produces NaN/Inf or training math degenerates.
struct NumericFault : std::runtime_error {
    explicit NumericFault(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace shadowcast

#endif
