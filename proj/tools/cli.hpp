#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flagdyn/flow.hpp"

namespace flagdyn::cli {

enum class Format { csv, json, dot };

struct RunConfig {
  std::string command;
  int n = 3;
  int k = 2;
  bool symplectic = false;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> eigenvalues;
  bool random_eigenvalues = false;
  std::optional<std::vector<double>> weights;
  double step = 1e-2;
  double horizon = 1.0;
  std::string output = "-";
  Format format = Format::csv;
  std::uint64_t max_vertices = 100'000;
  double tolerance = 1e-6;
  bool descent = false;
};

// Diagonal spectrum from an explicit list, from the seed, or the geometric default.
SpectralData generate_matrix(const RunConfig& cfg);

// Writes the command output to `out`; throws flagdyn::Error on failure.
void run(const RunConfig& cfg, std::ostream& out);

int exit_code(ErrorCode code);

// Full front end: parse, run, write, map errors to exit codes.
int main_entry(int argc, char** argv);

}  // namespace flagdyn::cli
