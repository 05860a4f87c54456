#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dipolar {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Direction of the applied field. Lattices lie in the xy-plane.
inline Vec3 field_axis() { return Vec3::UnitZ(); }

/// Invalid argument to a mathematical operation (non-positive physical
/// parameter, non-unit orientation, coincident sites, ...).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent or unsupported run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (non-convergence, sign problem, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File or stream failure, including unreadable checkpoints.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace dipolar
