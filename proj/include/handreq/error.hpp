#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace handreq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (joint limits, t_r <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Kinematic target outside the finger workspace.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double distance_to_workspace)
      : Error(what), distance_(distance_to_workspace) {}

  double distance_to_workspace() const noexcept { return distance_; }

 private:
  double distance_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::string column)
      : Error(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace handreq
