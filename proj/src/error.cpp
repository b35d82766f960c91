#include "ispu/error.hpp"

namespace ispu {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kContract: return "contract violation";
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kStreamDiscontinuity: return "stream discontinuity";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kWidthLegality: return "width legality error";
    case ErrorKind::kDegenerateNeuron: return "degenerate neuron";
    case ErrorKind::kMissingCalibration: return "missing calibration";
    case ErrorKind::kEvaluation: return "evaluation error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

}  // namespace ispu
