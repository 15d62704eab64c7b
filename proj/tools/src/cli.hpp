#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sectree::cli {

/// Parsed command line. Paths are read as given; `output` empty means stdout.
struct CommandConfig {
  std::string command;
  std::string input;
  std::string format = "edgelist";  // edgelist | taxonomy
  int k = 2;
  bool trace = false;
  std::uint64_t seed = 0;
  int trials = 100;
  std::string tree = "star";  // "star" or a tree file
  std::string weights;
  std::string pred;
  std::string gold;
  double threshold = 0.5;
  int k_min = 1;
  int k_max = 5;
  std::string output;
};

/// Runs one command. JSON goes to `out` (or the output file); a failure
/// writes one line to `err` and returns a nonzero status.
int run(const CommandConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sectree::cli
