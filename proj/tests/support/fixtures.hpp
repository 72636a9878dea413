#pragma once

// A fixed 20-instance training sample over the Model 1 variables.

#include <string>
#include <vector>

#include "wsd/tables.hpp"

namespace fixture {

struct Row {
  std::string r1pos, l1pos, ending, tag;
};

inline const std::vector<Row> kTwenty = {
    {"I", "J", "singular", "1"}, {"I", "J", "singular", "1"}, {"I", "D", "singular", "1"},
    {"V", "J", "plural", "1"},   {"I", "D", "singular", "1"}, {"N", "D", "singular", "1"},
    {"I", "J", "plural", "1"},   {"V", "D", "plural", "2"},   {"V", "D", "plural", "2"},
    {"N", "D", "plural", "2"},   {"V", "J", "singular", "2"}, {"V", "D", "plural", "2"},
    {"N", "J", "singular", "3"}, {"N", "J", "singular", "3"}, {"N", "D", "singular", "3"},
    {"I", "J", "singular", "3"}, {"N", "J", "plural", "3"},   {"N", "J", "singular", "3"},
    {"V", "D", "singular", "3"}, {"N", "D", "singular", "3"},
};

inline wsd::VariableSchema model1_schema() {
  return wsd::VariableSchema({{"r1pos", {"I", "N", "V"}},
                              {"l1pos", {"D", "J"}},
                              {"ending", {"singular", "plural"}},
                              {"tag", {"1", "2", "3"}}});
}

inline std::vector<wsd::Assignment> model1_rows() {
  std::vector<wsd::Assignment> out;
  for (const auto& r : kTwenty) out.push_back({{"r1pos", r.r1pos}, {"l1pos", r.l1pos}, {"ending", r.ending}, {"tag", r.tag}});
  return out;
}

inline std::vector<std::vector<std::string>> model1_features() {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : kTwenty) out.push_back({r.r1pos, r.l1pos, r.ending});
  return out;
}

inline std::vector<std::string> model1_labels() {
  std::vector<std::string> out;
  for (const auto& r : kTwenty) out.push_back(r.tag);
  return out;
}

}  // namespace fixture
