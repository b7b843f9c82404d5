#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gasp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scene configuration, material table or asset/material mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed PLY/OBJ payload. `offset` is the byte (or line) position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset, std::string property = {})
      : Error(what), offset_(offset), property_(std::move(property)) {}

  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& property() const noexcept { return property_; }

 private:
  std::uint64_t offset_;
  std::string property_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Collinear triangle or Gram-Schmidt input lying in the span of the frame.
class DegenerateError : public Error {
 public:
  DegenerateError(const std::string& what, std::size_t index) : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Non-finite particle state; the solver cannot continue.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, std::int64_t step, std::size_t particle)
      : Error(what), step_(step), particle_(particle) {}
  std::int64_t step() const noexcept { return step_; }
  std::size_t particle() const noexcept { return particle_; }

 private:
  std::int64_t step_;
  std::size_t particle_;
};

}  // namespace gasp
