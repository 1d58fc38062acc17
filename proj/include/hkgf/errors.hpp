#ifndef HKGF_ERRORS_HPP
#define HKGF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hkgf {

/// Invalid mathematical input (non-SPD matrix, non-positive mass, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration (bad weights, malformed config file, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Runtime numerical failure (non-finite sample, rejected step, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Time integration failure; carries the time stamp of the failing step.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " (t = " + std::to_string(t) + ")"), time(t) {}
    double time;
};

} // namespace hkgf

#endif
