#pragma once

// Command-line pipeline: extract -> search -> evaluate, plus graph export.
//
// Exit codes: 0 success, 1 internal error, 2 usage or configuration,
// 3 capability limit, 4 data/model mismatch.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsd/features.hpp"
#include "wsd/goodness.hpp"

namespace wsd::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kCapability = 3,
  kMismatch = 4,
};

struct RunConfig {
  std::filesystem::path corpus;
  std::vector<std::string> target_forms;
  std::vector<std::string> noun_tags{"NN", "NNS"};
  std::vector<std::string> senses;  // empty: observed senses, sorted
  FeatureSpec features;
  std::size_t candidate_count = 400;
  std::size_t select_count = 5;
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
  SearchOptions search;
  std::vector<std::string> search_variables;  // empty: all schema variables
  std::string root = "tag";
  std::filesystem::path output_dir = "out";
};

// Reads a JSON run configuration. Relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsd::cli
