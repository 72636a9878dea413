#include "wsd/goodness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "wsd/error.hpp"
#include "wsd/text.hpp"

namespace wsd {

namespace {

std::int64_t cells_of(const VariableSchema& schema, VarSet set, const InteractionGraph& graph) {
  std::int64_t cells = 1;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if ((set >> v) & 1u) cells *= static_cast<std::int64_t>(schema.cardinality(schema.index_of(graph.name(v))));
  }
  return cells;
}

void check_schema(const DecomposableModel& model, const VariableSchema& schema) {
  if (model.graph().size() != schema.size()) throw ArgumentError("model and schema have different variables");
  for (const auto& v : model.graph().vertices()) {
    if (!schema.find(v)) throw ArgumentError("model variable '" + v + "' is not in the schema");
  }
}

// Regularized lower incomplete gamma P(a, x) by its power series; x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction; x ≥ a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::vector<std::pair<std::size_t, std::size_t>> missing_edges(const InteractionGraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b)
      if (!g.has_edge(a, b)) out.emplace_back(a, b);
  return out;
}

}  // namespace

double g_squared(const ContingencyTable& table, const FittedModel& fitted) {
  if (!(table.schema() == fitted.schema())) throw ArgumentError("table and fitted model schemas differ");
  return g_squared(ObservedCells::from_table(table), fitted);
}

double g_squared(const ObservedCells& data, const FittedModel& fitted) {
  if (!(data.schema() == fitted.schema())) throw ArgumentError("data and fitted model schemas differ");
  long double sum = 0.0L;
  for (std::size_t c = 0; c < data.cells().size(); ++c) {
    const auto x = static_cast<long double>(data.counts()[c]);
    const auto e = fitted.expected_count(data.cells()[c]);
    if (!e || *e <= 0.0L) return std::numeric_limits<double>::infinity();
    sum += x * std::log(x / *e);
  }
  // Rounding can leave a tiny negative sum for models that fit exactly.
  return std::max(0.0, static_cast<double>(2.0L * sum));
}

std::int64_t model_dimension(const DecomposableModel& model, const VariableSchema& schema) {
  check_schema(model, schema);
  std::int64_t dim = 0;
  for (auto c : model.cliques()) dim += cells_of(schema, c, model.graph()) - 1;
  for (auto s : model.separators()) dim -= cells_of(schema, s, model.graph()) - 1;
  return dim;
}

std::int64_t model_df(const DecomposableModel& model, const VariableSchema& schema) {
  const auto q = schema.cell_count();
  if (q > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw CapabilityError("cell count too large for degrees of freedom");
  }
  return static_cast<std::int64_t>(q) - 1 - model_dimension(model, schema);
}

double chi_square_sf(double x, std::int64_t df) {
  if (std::isnan(x) || x < 0.0) throw ArgumentError("chi-square statistic must be non-negative");
  if (df < 0) throw ArgumentError("degrees of freedom must be non-negative");
  if (df == 0) return x == 0.0 ? 1.0 : 0.0;
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double a = 0.5 * static_cast<double>(df);
  const double half = 0.5 * x;
  if (half < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, half), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, half), 0.0, 1.0);
}

bool sparsity_flag(const FittedModel& fitted, double threshold) {
  for (const auto& clique : fitted.clique_tables()) {
    const auto counts = clique.counts();
    const auto zeros = static_cast<double>(std::count(counts.begin(), counts.end(), std::uint64_t{0}));
    if (zeros / static_cast<double>(counts.size()) > threshold) return true;
    // Expected clique counts under the MLE reproduce the observed marginal.
    const auto smallest = *std::min_element(counts.begin(), counts.end());
    if (smallest < 1) return true;
  }
  return false;
}

bool sparsity_flag(const DecomposableModel& model, const ContingencyTable& table, double threshold) {
  return sparsity_flag(fit_mle(model, table), threshold);
}

FitReport assess(const DecomposableModel& model, const ObservedCells& data, double sparsity_threshold) {
  const auto fitted = fit_mle(model, data);
  FitReport report;
  report.g2 = g_squared(data, fitted);
  report.df = model_df(model, data.schema());
  report.p_value = chi_square_sf(report.g2, report.df);
  report.sparse = sparsity_flag(fitted, sparsity_threshold);
  report.param_count = model_dimension(model, data.schema());
  return report;
}

FitReport assess(const DecomposableModel& model, const ContingencyTable& table, double sparsity_threshold) {
  return assess(model, ObservedCells::from_table(table), sparsity_threshold);
}

bool ranks_before(const RankedModel& a, const RankedModel& b, double alpha) {
  const auto& ra = a.report;
  const auto& rb = b.report;
  if (ra.sparse != rb.sparse) return !ra.sparse;
  const bool fa = ra.p_value >= alpha;
  const bool fb = rb.p_value >= alpha;
  if (fa != fb) return fa;
  if (ra.param_count != rb.param_count) return ra.param_count < rb.param_count;
  if (ra.p_value != rb.p_value) return ra.p_value > rb.p_value;
  return a.model.graph().named_edges() < b.model.graph().named_edges();
}

SearchResult rank_models(const std::vector<DecomposableModel>& candidates, const ObservedCells& data,
                         const SearchOptions& options) {
  SearchResult result;
  result.ranked.reserve(candidates.size());
  for (const auto& m : candidates) result.ranked.push_back({m, assess(m, data, options.sparsity_threshold)});
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [&](const RankedModel& a, const RankedModel& b) { return ranks_before(a, b, options.alpha); });
  return result;
}

SearchResult search_models(const ObservedCells& data, const SearchOptions& options) {
  const auto names = data.schema().names();
  if (options.strategy == SearchStrategy::exhaustive) {
    ModelEnumerator enumerator(names, options.max_vars);
    std::vector<DecomposableModel> all;
    while (auto m = enumerator.next()) all.push_back(std::move(*m));
    return rank_models(all, data, options);
  }

  // Greedy forward selection. Models are keyed by edge set to avoid re-assessment.
  std::map<std::vector<std::pair<std::string, std::string>>, RankedModel> seen;
  auto evaluate = [&](const InteractionGraph& g) -> const RankedModel& {
    auto key = g.named_edges();
    auto it = seen.find(key);
    if (it == seen.end()) {
      auto model = junction_tree(g);
      auto report = assess(model, data, options.sparsity_threshold);
      it = seen.emplace(std::move(key), RankedModel{std::move(model), report}).first;
    }
    return it->second;
  };

  InteractionGraph current(names);
  FitReport current_report = evaluate(current).report;
  while (current_report.p_value < options.alpha) {
    std::optional<InteractionGraph> best;
    FitReport best_report;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (auto [a, b] : missing_edges(current)) {
      InteractionGraph candidate = current;
      candidate.add_edge(a, b);
      if (!check_decomposable(candidate).chordal) continue;
      const auto& report = evaluate(candidate).report;
      const auto df_spent = static_cast<double>(current_report.df - report.df);
      const double drop = current_report.g2 - report.g2;
      const double gain = df_spent > 0 ? drop / df_spent : -std::numeric_limits<double>::infinity();
      // Candidates come in vertex-index order; strict > keeps the first on ties.
      if (!best || gain > best_gain) {
        best = candidate;
        best_report = report;
        best_gain = gain;
      }
    }
    if (!best) break;
    current = *best;
    current_report = best_report;
  }

  SearchResult result;
  for (auto& [key, ranked] : seen) result.ranked.push_back(std::move(ranked));
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [&](const RankedModel& a, const RankedModel& b) { return ranks_before(a, b, options.alpha); });
  return result;
}

SearchResult search_models(const ContingencyTable& table, const SearchOptions& options) {
  return search_models(ObservedCells::from_table(table), options);
}

FitReport feature_informativeness(const ContingencyTable& feature_by_tag) {
  const auto& schema = feature_by_tag.schema();
  if (schema.size() != 2 || schema[1].name != "tag") {
    throw ArgumentError("informativeness needs a (feature, tag) table");
  }
  return assess(independence_model(schema.names()), feature_by_tag);
}

std::string format_search_report(const SearchResult& result) {
  std::ostringstream out;
  out << "rank\tmodel\tedges\tg2\tdf\tp_value\tparams\tsparse\n";
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& [model, r] = result.ranked[i];
    std::vector<std::string> edges;
    for (const auto& [a, b] : model.graph().named_edges()) edges.push_back(a + "-" + b);
    out << (i + 1) << '\t' << model.formula() << '\t' << (edges.empty() ? "(none)" : join(edges, ",")) << '\t'
        << format_fixed(r.g2, 6) << '\t' << r.df << '\t' << format_double(r.p_value) << '\t' << r.param_count
        << '\t' << (r.sparse ? "yes" : "no") << '\n';
  }
  return out.str();
}

}  // namespace wsd
