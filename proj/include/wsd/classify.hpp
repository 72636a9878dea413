#pragma once

// Sense tagging with a fitted decomposable model. A usage whose feature
// combination is not covered by the training estimates is left untagged and
// scored as wrong.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsd/decomposable.hpp"
#include "wsd/tables.hpp"

namespace wsd {

struct SenseScore {
  std::string sense;
  std::optional<double> score;  // nullopt: this sense's cell is uncovered
};

struct Posterior {
  std::vector<SenseScore> scores;  // in tag value order
  // Every sense uncovered, or every covered score zero.
  bool uncovered = false;
};

struct Prediction {
  std::string id;
  std::optional<std::string> sense;  // nullopt: untagged
  double score = 0.0;

  bool tagged() const { return sense.has_value(); }
};

struct LabeledInstance {
  std::string id;
  Assignment features;
  std::string gold;
};

inline constexpr std::string_view kUntaggedLabel = "(untagged)";

struct EvaluationReport {
  std::uint64_t total = 0;
  std::uint64_t correct = 0;
  std::uint64_t wrong_tagged = 0;
  std::uint64_t untagged = 0;
  // gold sense -> predicted sense (or kUntaggedLabel) -> count
  std::map<std::string, std::map<std::string, std::uint64_t>> confusion;

  double percent_correct() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

class Classifier {
 public:
  explicit Classifier(const FittedModel& fitted, std::string tag_variable = "tag");

  // `features` must assign every model variable except the tag; variables the
  // model does not use are ignored.
  Posterior posterior(const Assignment& features) const;
  Prediction classify(const Assignment& features, std::string id = {}) const;
  EvaluationReport evaluate(std::span<const LabeledInstance> test, std::vector<Prediction>* predictions = nullptr) const;

 private:
  const FittedModel& fitted_;
  std::size_t tag_ = 0;
  std::vector<std::uint64_t> tag_counts_;  // training marginal, for tie-breaking
};

Posterior posterior(const FittedModel& fitted, const Assignment& features);
Prediction classify(const FittedModel& fitted, const Assignment& features);
EvaluationReport evaluate(const FittedModel& fitted, std::span<const LabeledInstance> test,
                          std::vector<Prediction>* predictions = nullptr);

std::string format_evaluation(const EvaluationReport& report);
// One tab-separated record per instance: id, outcome, sense, score.
std::string format_predictions(std::span<const Prediction> predictions);

}  // namespace wsd
