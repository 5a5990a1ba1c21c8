#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sivo {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BehindCamera : public Error {
 public:
  using Error::Error;
};

class DegenerateDisparity : public Error {
 public:
  using Error::Error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class EmptySampleSet : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Gauss-Newton cost rose for too many consecutive iterations.
class DivergedUpdate : public Error {
 public:
  using Error::Error;
};

/// A simulated sequence could not be continued; carries the failing frame.
class EstimatorDiverged : public Error {
 public:
  EstimatorDiverged(std::size_t frame, const std::string& what)
      : Error("estimator diverged at frame " + std::to_string(frame) + ": " +
              what),
        frame_(frame) {}
  std::size_t frame() const noexcept { return frame_; }

 private:
  std::size_t frame_;
};

/// Parse failure with a 1-based line number.
class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonRigidRotation : public Error {
 public:
  using Error::Error;
};

class InconsistentC : public Error {
 public:
  using Error::Error;
};

class NoOverlap : public Error {
 public:
  using Error::Error;
};

class ZeroBaseline : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sivo
