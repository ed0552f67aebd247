#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "scsl/cli/cli.hpp"

namespace scsl::testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "scsl");
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string fixture(const std::string& name) { return std::string(SCSL_FIXTURE_DIR) + "/" + name; }

}  // namespace scsl::testing
