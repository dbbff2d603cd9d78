#ifndef IPS_ERRORS_HPP
#define IPS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ips {

/// Bad or inconsistent configuration (files, parameters, scenarios).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Input points violate the vehicle geometry assumptions.
struct GeometryViolation : std::runtime_error {
    explicit GeometryViolation(const std::string& what) : std::runtime_error(what) {}
};

/// A world point maps to infinity (or back) under the camera model.
struct ProjectionError : std::runtime_error {
    explicit ProjectionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ips

#endif  // IPS_ERRORS_HPP
