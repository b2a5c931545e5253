#pragma once

#include <stdexcept>
#include <string>

namespace noisereg {

/// Invalid configuration (bad field values, malformed config files).
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or inconsistent input data (genotype/phenotype files).
class data_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure in a solver.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// OLS on a design whose Gram matrix is numerically singular.
class singular_design_error : public numerical_error {
public:
  singular_design_error(const std::string& what, double smallest_singular_value)
      : numerical_error(what), smallest_singular_value_(smallest_singular_value) {}
  double smallest_singular_value() const { return smallest_singular_value_; }

private:
  double smallest_singular_value_;
};

/// Ridge with a lambda that leaves the penalized Gram matrix indefinite.
/// Carries the smallest admissible lambda for this design.
class indefinite_ridge_error : public numerical_error {
public:
  indefinite_ridge_error(const std::string& what, double lambda_lower_bound)
      : numerical_error(what), lambda_lower_bound_(lambda_lower_bound) {}
  double lambda_lower_bound() const { return lambda_lower_bound_; }

private:
  double lambda_lower_bound_;
};

/// Partitioned solve with a singular W-Gram or Schur complement.
class singular_partition_error : public numerical_error {
public:
  using numerical_error::numerical_error;
};

} // namespace noisereg
