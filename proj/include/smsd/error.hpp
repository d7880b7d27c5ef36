#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smsd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes, bounds, non-finite values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// Command-line or config-file problem; `key` names the offending option.
class UsageError : public Error {
 public:
  UsageError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class FormatError : public Error {
 public:
  FormatError(std::uint64_t offset, const std::string& what)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MissingPatchError : public Error {
 public:
  struct Gap {
    std::int64_t row;
    std::int64_t col;
  };
  MissingPatchError(std::vector<Gap> gaps, const std::string& what)
      : Error(what), gaps_(std::move(gaps)) {}
  const std::vector<Gap>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<Gap> gaps_;
};

// All singular values of the dictionary fell below the rank cutoff.
class DegenerateDictionary : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  StepSizeError(std::vector<double> trace, const std::string& what)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

// Warnings are routed through a process-wide handler (stderr by default).
// The handler may be called concurrently; calls are serialized internally.
using WarningHandler = std::function<void(std::string_view)>;

void warn(std::string_view message);
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace smsd
