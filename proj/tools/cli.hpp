#pragma once

#include <iosfwd>

namespace mfgnet::cli {

// Exit status: 0 ok, 1 domain error (JSON record on `err`), 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfgnet::cli
