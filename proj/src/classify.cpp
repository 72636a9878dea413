#include "wsd/classify.hpp"

#include <sstream>

#include "wsd/error.hpp"
#include "wsd/text.hpp"

namespace wsd {

Classifier::Classifier(const FittedModel& fitted, std::string tag_variable) : fitted_(fitted) {
  const auto& schema = fitted.schema();
  auto tag = schema.find(tag_variable);
  if (!tag) throw ArgumentError("model has no '" + tag_variable + "' variable");
  tag_ = *tag;

  const auto& cliques = fitted.model().cliques();
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    if (!((cliques[c] >> tag_) & 1u)) continue;
    const auto& table = fitted.clique_tables()[c];
    const std::size_t position = table.schema().index_of(tag_variable);
    const std::size_t keep[] = {position};
    const auto marginal = marginalize(table, keep);
    tag_counts_.assign(marginal.counts().begin(), marginal.counts().end());
    break;
  }
}

Posterior Classifier::posterior(const Assignment& features) const {
  const auto& schema = fitted_.schema();
  Codes codes(schema.size(), 0);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i == tag_) continue;
    auto value = features.get(schema[i].name);
    if (!value) throw ArgumentError("features are missing variable '" + schema[i].name + "'");
    codes[i] = schema.value_index(i, *value);
  }

  Posterior out;
  bool any_positive = false;
  for (std::size_t s = 0; s < schema.cardinality(tag_); ++s) {
    codes[tag_] = s;
    auto p = fitted_.estimate(codes);
    if (p && *p > 0.0) any_positive = true;
    out.scores.push_back({schema[tag_].values[s], p});
  }
  out.uncovered = !any_positive;
  return out;
}

Prediction Classifier::classify(const Assignment& features, std::string id) const {
  const auto post = posterior(features);
  Prediction prediction{std::move(id), std::nullopt, 0.0};
  if (post.uncovered) return prediction;

  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < post.scores.size(); ++s) {
    const auto& score = post.scores[s].score;
    if (!score || *score <= 0.0) continue;
    if (!best) {
      best = s;
      continue;
    }
    const double incumbent = *post.scores[*best].score;
    if (*score > incumbent) {
      best = s;
    } else if (*score == incumbent) {
      if (tag_counts_[s] > tag_counts_[*best] ||
          (tag_counts_[s] == tag_counts_[*best] && post.scores[s].sense < post.scores[*best].sense)) {
        best = s;
      }
    }
  }
  prediction.sense = post.scores[*best].sense;
  prediction.score = *post.scores[*best].score;
  return prediction;
}

EvaluationReport Classifier::evaluate(std::span<const LabeledInstance> test, std::vector<Prediction>* predictions) const {
  EvaluationReport report;
  for (const auto& inst : test) {
    auto prediction = classify(inst.features, inst.id);
    ++report.total;
    std::string outcome(kUntaggedLabel);
    if (!prediction.tagged()) {
      ++report.untagged;
    } else {
      outcome = *prediction.sense;
      if (outcome == inst.gold) {
        ++report.correct;
      } else {
        ++report.wrong_tagged;
      }
    }
    ++report.confusion[inst.gold][outcome];
    if (predictions) predictions->push_back(std::move(prediction));
  }
  return report;
}

Posterior posterior(const FittedModel& fitted, const Assignment& features) {
  return Classifier(fitted).posterior(features);
}

Prediction classify(const FittedModel& fitted, const Assignment& features) {
  return Classifier(fitted).classify(features);
}

EvaluationReport evaluate(const FittedModel& fitted, std::span<const LabeledInstance> test,
                          std::vector<Prediction>* predictions) {
  return Classifier(fitted).evaluate(test, predictions);
}

std::string format_evaluation(const EvaluationReport& report) {
  std::ostringstream out;
  out << "total\t" << report.total << '\n';
  out << "correct\t" << report.correct << '\n';
  out << "wrong_tagged\t" << report.wrong_tagged << '\n';
  out << "untagged\t" << report.untagged << '\n';
  out << "percent_correct\t" << format_fixed(100.0 * report.percent_correct(), 2) << "%\n";
  if (report.total == 0) out << "notice\tempty test set; nothing was classified\n";
  out << "\ngold\tpredicted\tcount\n";
  for (const auto& [gold, row] : report.confusion)
    for (const auto& [predicted, count] : row) out << gold << '\t' << predicted << '\t' << count << '\n';
  return out.str();
}

std::string format_predictions(std::span<const Prediction> predictions) {
  std::ostringstream out;
  out << "id\toutcome\tsense\tscore\n";
  for (const auto& p : predictions) {
    out << p.id << '\t' << (p.tagged() ? "tagged" : "untagged") << '\t' << (p.tagged() ? *p.sense : "-") << '\t'
        << (p.tagged() ? format_double(p.score) : "-") << '\n';
  }
  return out.str();
}

}  // namespace wsd
