#pragma once

namespace ispu::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInputParse = 3,
  kModelMismatch = 4,
};

int run(int argc, char** argv);

}  // namespace ispu::cli
