#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pulseforge {

// Root of every error the library throws. Callers that only need to report
// a failure can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise malformed numeric input.
class InputError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

// CSV parse failure. row() is 1-based and counts the header line if present.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row) : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

// Data that is well formed but unusable (zero-energy fit pairs, missing files).
class DataError : public Error {
 public:
  using Error::Error;
};

class FitDegenerateError : public Error {
 public:
  using Error::Error;
};

class SelectionError : public Error {
 public:
  SelectionError(const std::string& what, std::size_t count) : Error(what), count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

class TimingError : public Error {
 public:
  TimingError(const std::string& what, double deficit_s) : Error(what), deficit_s_(deficit_s) {}
  double deficit_s() const noexcept { return deficit_s_; }

 private:
  double deficit_s_;
};

// Wraps a failure raised inside a user-supplied plant evaluator.
class PlantError : public Error {
 public:
  PlantError(const std::string& what, std::size_t iteration) : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace pulseforge
