#pragma once

// Goodness of fit for decomposable models: the likelihood-ratio statistic G²,
// degrees of freedom, chi-square tail probabilities, sparsity screening, and
// model search.

#include <cstdint>
#include <string>
#include <vector>

#include "wsd/decomposable.hpp"
#include "wsd/tables.hpp"

namespace wsd {

struct FitReport {
  double g2 = 0.0;
  std::int64_t df = 0;
  double p_value = 1.0;
  bool sparse = false;
  std::int64_t param_count = 0;
};

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kDefaultSparsityThreshold = 0.20;

// 2 Σ x ln(x / (N p̂)) over cells with x > 0. Returns +infinity when an observed
// cell has zero or uncovered estimated probability.
double g_squared(const ContingencyTable& table, const FittedModel& fitted);
double g_squared(const ObservedCells& data, const FittedModel& fitted);

// Free parameters of the model: Σ_cliques (Π card − 1) − Σ_separators (Π card − 1).
std::int64_t model_dimension(const DecomposableModel& model, const VariableSchema& schema);
// (q − 1) − dim(model).
std::int64_t model_df(const DecomposableModel& model, const VariableSchema& schema);

// Upper tail of the chi-square distribution. df = 0 is degenerate: 1 if x == 0, else 0.
double chi_square_sf(double x, std::int64_t df);

// True iff some clique marginal has more than `threshold` of its cells empty, or
// some clique marginal has a fitted expected count below 1. The fitted clique
// marginals equal the observed ones, so the second trigger fires on any empty cell.
bool sparsity_flag(const FittedModel& fitted, double threshold = kDefaultSparsityThreshold);
bool sparsity_flag(const DecomposableModel& model, const ContingencyTable& table,
                   double threshold = kDefaultSparsityThreshold);

FitReport assess(const DecomposableModel& model, const ObservedCells& data,
                 double sparsity_threshold = kDefaultSparsityThreshold);
FitReport assess(const DecomposableModel& model, const ContingencyTable& table,
                 double sparsity_threshold = kDefaultSparsityThreshold);

enum class SearchStrategy { exhaustive, greedy };

struct SearchOptions {
  SearchStrategy strategy = SearchStrategy::exhaustive;
  double alpha = kDefaultAlpha;
  double sparsity_threshold = kDefaultSparsityThreshold;
  std::size_t max_vars = kDefaultMaxVars;
};

struct RankedModel {
  DecomposableModel model;
  FitReport report;
};

struct SearchResult {
  std::vector<RankedModel> ranked;
};

// Ranking: non-sparse first, then p ≥ alpha first, then fewer parameters,
// then larger p-value, then lexicographic edge set.
bool ranks_before(const RankedModel& a, const RankedModel& b, double alpha);

// Assesses and ranks an explicit candidate list.
SearchResult rank_models(const std::vector<DecomposableModel>& candidates, const ObservedCells& data,
                         const SearchOptions& options);

// Exhaustive: every decomposable model (d ≤ max_vars, else CapabilityError).
// Greedy: forward edge addition from the independence model, taking the
// decomposability-preserving edge with the largest G² drop per df spent,
// stopping once p ≥ alpha. Every model assessed along the way is ranked.
SearchResult search_models(const ObservedCells& data, const SearchOptions& options);
SearchResult search_models(const ContingencyTable& table, const SearchOptions& options);

// Independence fit between a feature and the sense tag. The table must have
// exactly two variables with the second named "tag".
FitReport feature_informativeness(const ContingencyTable& feature_by_tag);

// Tab-separated report, one line per ranked model.
std::string format_search_report(const SearchResult& result);

}  // namespace wsd
