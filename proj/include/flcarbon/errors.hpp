#pragma once

#include <stdexcept>
#include <string>

namespace flcarbon {

// Raised for malformed documents and violated input invariants. `path`
// names the offending field, e.g. "silo_clusters[1].node_count".
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string path, const std::string& message)
        : std::invalid_argument(path.empty() ? message : path + ": " + message),
          path_(std::move(path)), message_(message) {}

    const std::string& path() const noexcept { return path_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string path_;
    std::string message_;
};

// Numerical failure inside the simulator (e.g. gradient descent diverged).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Illegal state transition or dangling reference in the request registry.
class RegistryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace flcarbon
