#pragma once

#include <stdexcept>
#include <string>

namespace specrules {

// File system trouble: unreadable or unwritable paths.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent user input: bad cell values, rule files that
// disagree with the dataset they claim to describe.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A synthesis request that admits no integer-count realization.
class UnrealizableError : public std::runtime_error {
 public:
  explicit UnrealizableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specrules
