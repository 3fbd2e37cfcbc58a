#pragma once

#include <iosfwd>

namespace nnlscs::cli {

// Routes argv to the library operations. Payload JSON (or CSV where a
// subcommand says so) goes to `out`; logs and errors go to `err`.
// Exit codes: 0 ok, 2 usage/invalid input, 3 infeasible or inapplicable,
// 4 solver failure or indeterminate.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nnlscs::cli
