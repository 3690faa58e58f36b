#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zsml {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke a precondition (dimension mismatch, invalid argument, ...).
struct ContractError : Error {
  explicit ContractError(const std::string& what) : Error(what) {}
};

/// A file could not be read, parsed, or did not match its declared shape.
struct DataError : Error {
  explicit DataError(const std::string& what) : Error(what) {}
};

/// Cholesky factorization hit a non-positive pivot after the jitter retry.
struct FactorizationError : Error {
  FactorizationError(const std::string& what, std::size_t pivot)
      : Error(what), pivot_index(pivot) {}
  std::size_t pivot_index;
};

/// Iterative training produced a non-finite objective.
struct DivergedError : Error {
  DivergedError(const std::string& what, std::size_t epoch)
      : Error(what), epoch(epoch) {}
  std::size_t epoch;
};

}  // namespace zsml
