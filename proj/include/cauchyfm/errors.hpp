#pragma once

#include <stdexcept>
#include <string>

namespace cauchyfm {

// Invalid or inconsistent experiment/mesh configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inadmissible geometry: boundary contact, degenerate polygon, point outside B.
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation at a coincident source/target pair.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Field evaluation requested inside the quadrature clearance band.
class AccuracyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Singular systems, empty spectra, aborted iterations (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cauchyfm
