#pragma once

#include <stdexcept>
#include <string>

namespace ispu {

enum class ErrorKind {
  kContract,
  kDimension,
  kStreamDiscontinuity,
  kParse,
  kValidation,
  kWidthLegality,
  kDegenerateNeuron,
  kMissingCalibration,
  kEvaluation,
  kIo,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Validation failure tied to a specific layer of a model (0 = input BN).
class LayerError : public Error {
 public:
  LayerError(ErrorKind kind, int layer, const std::string& what)
      : Error(kind, "layer " + std::to_string(layer) + ": " + what),
        layer_(layer) {}

  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

}  // namespace ispu
