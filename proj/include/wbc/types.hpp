#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace wbc {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector9d = Eigen::Matrix<double, 9, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix9d = Eigen::Matrix<double, 9, 9>;
using Matrix63d = Eigen::Matrix<double, 6, 3>;
using Matrix69d = Eigen::Matrix<double, 6, 9>;

/// Task system too ill-conditioned to invert; callers may retry damped.
class SingularTask : public std::runtime_error {
 public:
  explicit SingularTask(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario setup or execution failed; message carries the field path or cycle.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Config text is not syntactically valid (bad JSON, duplicate key, unknown key).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Config parsed but violates a documented constraint; message names it.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough samples to fit a model.
class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be written or read.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wbc
