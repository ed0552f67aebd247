#include "scsl/cli/cli.hpp"

int main(int argc, char** argv) { return scsl::cli::run(argc, argv); }
