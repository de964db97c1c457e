#pragma once

#include <stdexcept>
#include <string>

namespace shiftlab {

struct dimension_error : std::invalid_argument {
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

struct singular_matrix_error : std::domain_error {
  explicit singular_matrix_error(const std::string& what) : std::domain_error(what) {}
};

struct zero_vector_error : std::domain_error {
  explicit zero_vector_error(const std::string& what) : std::domain_error(what) {}
};

struct degenerate_basis_error : std::domain_error {
  explicit degenerate_basis_error(const std::string& what) : std::domain_error(what) {}
};

// Raised when an operation requires a certificate that is absent or false.
struct refusal_error : std::runtime_error {
  explicit refusal_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a series partial sum blows up, signalling a wrong certificate.
struct divergence_error : std::runtime_error {
  explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shiftlab
