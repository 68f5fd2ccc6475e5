#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slbm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
  public:
    using Error::Error;
};

class InvalidParameter : public Error {
  public:
    using Error::Error;
};

/// Malformed geometry file; carries the byte offset where decoding failed.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

/// Fluid node whose stencil leaves the domain through a non-periodic face.
class TopologyError : public Error {
  public:
    using Error::Error;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Operation applied to a field in the wrong propagation state (e.g. parity).
class StateError : public Error {
  public:
    using Error::Error;
};

class InstabilityError : public Error {
  public:
    InstabilityError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

  private:
    std::size_t step_;
};

class InvalidPartition : public Error {
  public:
    using Error::Error;
};

/// Random sphere packing gave up before reaching the requested porosity.
class PackingFailure : public Error {
  public:
    PackingFailure(const std::string& what, double achieved_porosity)
        : Error(what + " (achieved porosity " + std::to_string(achieved_porosity) + ")"),
          achieved_(achieved_porosity) {}

    [[nodiscard]] double achieved_porosity() const noexcept { return achieved_; }

  private:
    double achieved_;
};

/// Machine model lacks an entry required by a prediction.
class ModelError : public Error {
  public:
    using Error::Error;
};

} // namespace slbm
