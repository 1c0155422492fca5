#pragma once

#include <iosfwd>

namespace hmmu::cli {

/// Entry point of the `hmmusim` tool; returns the process exit code.
int main(int argc, char** argv);
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hmmu::cli
