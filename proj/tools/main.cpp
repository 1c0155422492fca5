#include "cli.hpp"

int main(int argc, char** argv) { return hmmu::cli::main(argc, argv); }
