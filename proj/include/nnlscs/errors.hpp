#pragma once

#include <stdexcept>

namespace nnlscs {

// The program's constraint set is empty (e.g. BPDN with eta below the
// residual floor), or a bound's hypothesis fails (kappa*rho >= 1).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nnlscs
