#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reloc {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed files, broken invariants, unknown references.
// The CLI maps this family to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public ValidationError {
 public:
  SchemaError(std::string path, const std::string& what)
      : ValidationError(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  // Same error, message prefixed with the offending file name.
  SchemaError in_file(const std::string& file) const {
    return SchemaError(path_, file + ": " + what(), 0);
  }

 private:
  SchemaError(std::string path, const std::string& full_message, int)
      : ValidationError(full_message), path_(std::move(path)) {}

  std::string path_;
};

class PlacementError : public ValidationError {
 public:
  using Collision = std::pair<std::string, std::string>;

  PlacementError(const std::string& what, std::vector<Collision> collisions)
      : ValidationError(what), collisions_(std::move(collisions)) {}

  const std::vector<Collision>& collisions() const { return collisions_; }

 private:
  std::vector<Collision> collisions_;
};

class ReferenceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A route that leaves the walkable grid or saturates the head pitch.
class RouteError : public ValidationError {
 public:
  RouteError(const std::string& what, std::optional<std::size_t> action_index)
      : ValidationError(what), action_index_(action_index) {}

  std::optional<std::size_t> action_index() const { return action_index_; }

 private:
  std::optional<std::size_t> action_index_;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Comparing logs that were not captured along the same route/camera.
class ProtocolError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CoverageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Input file missing or unreadable.
class InputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failures that are not the caller's data being wrong. Exit code 2.
class RandomizationError : public Error {
 public:
  using Error::Error;
};

class OutputError : public Error {
 public:
  using Error::Error;
};

}  // namespace reloc
