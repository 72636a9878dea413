#pragma once

// Decomposable models: chordal interaction graphs, their junction trees,
// closed-form maximum likelihood fits, and graph exports.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsd/tables.hpp"

namespace wsd {

// Bit i set <=> graph vertex i is a member.
using VarSet = std::uint64_t;

inline constexpr std::size_t kMaxGraphVertices = 64;
inline constexpr std::size_t kDefaultMaxVars = 6;

class InteractionGraph {
 public:
  InteractionGraph() = default;
  explicit InteractionGraph(std::vector<std::string> vertices);
  InteractionGraph(std::vector<std::string> vertices,
                   const std::vector<std::pair<std::string, std::string>>& edges);

  static InteractionGraph complete(std::vector<std::string> vertices);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::string& name(std::size_t v) const { return vertices_[v]; }
  std::optional<std::size_t> find(std::string_view name) const;

  VarSet neighbors(std::size_t v) const { return adjacency_[v]; }
  bool has_edge(std::size_t a, std::size_t b) const { return (adjacency_[a] >> b) & 1u; }
  void add_edge(std::size_t a, std::size_t b);
  void remove_edge(std::size_t a, std::size_t b);
  std::size_t edge_count() const;

  // Vertex-index pairs (a < b), ordered by (a, b).
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  // Name pairs with each pair ordered lexicographically, sorted lexicographically.
  std::vector<std::pair<std::string, std::string>> named_edges() const;

  VarSet all() const;
  std::vector<std::string> names(VarSet set) const;

  bool operator==(const InteractionGraph&) const = default;

 private:
  std::vector<std::string> vertices_;
  std::vector<VarSet> adjacency_;
};

struct ChordalityResult {
  bool chordal = false;
  // Perfect elimination ordering (first eliminated first) when chordal.
  std::vector<std::size_t> elimination_order;
};

// Maximum-cardinality search with lexicographic tie-breaking.
ChordalityResult check_decomposable(const InteractionGraph& graph);

// Perfect elimination ordering whose final vertex is `root`, or nullopt if the graph is
// not chordal. Without a root the lexicographically smallest name is eliminated last.
std::optional<std::vector<std::size_t>> rooted_elimination_order(const InteractionGraph& graph,
                                                                 std::optional<std::size_t> root);

class DecomposableModel {
 public:
  const InteractionGraph& graph() const { return graph_; }
  const std::vector<VarSet>& cliques() const { return cliques_; }
  // Parallel to tree_edges(): separator i joins cliques tree_edges()[i].
  const std::vector<VarSet>& separators() const { return separators_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& tree_edges() const { return tree_edges_; }
  const std::vector<std::size_t>& elimination_order() const { return elimination_order_; }
  std::size_t component_count() const { return components_; }

  std::vector<std::vector<std::string>> clique_names() const;
  std::vector<std::vector<std::string>> separator_names() const;
  // Clique list such as "[ending,tag][l1pos,tag]".
  std::string formula() const;

  bool operator==(const DecomposableModel&) const = default;

 private:
  friend DecomposableModel junction_tree(const InteractionGraph& graph);

  InteractionGraph graph_;
  std::vector<VarSet> cliques_;
  std::vector<VarSet> separators_;
  std::vector<std::pair<std::size_t, std::size_t>> tree_edges_;
  std::vector<std::size_t> elimination_order_;
  std::size_t components_ = 0;
};

// Throws DecomposabilityError for non-chordal graphs.
DecomposableModel junction_tree(const InteractionGraph& graph);

DecomposableModel independence_model(std::vector<std::string> vertices);
DecomposableModel saturated_model(std::vector<std::string> vertices);

// Streams every chordal graph over the vertex set exactly once, in ascending
// edge-mask order (bit k is the k-th pair of the (a < b) lexicographic pair list).
class ModelEnumerator {
 public:
  // Throws CapabilityError when there are more than `max_vars` vertices.
  explicit ModelEnumerator(std::vector<std::string> vertices, std::size_t max_vars = kDefaultMaxVars);

  std::optional<DecomposableModel> next();

 private:
  std::vector<std::string> vertices_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::uint64_t mask_ = 0;
  std::uint64_t end_ = 0;
};

std::vector<DecomposableModel> enumerate_models(const VariableSchema& schema,
                                                std::size_t max_vars = kDefaultMaxVars);

// Clique and separator marginals of a data table under a decomposable model.
class FittedModel {
 public:
  const DecomposableModel& model() const { return model_; }
  const VariableSchema& schema() const { return schema_; }
  const std::vector<ContingencyTable>& clique_tables() const { return clique_tables_; }
  const std::vector<ContingencyTable>& separator_tables() const { return separator_tables_; }
  std::uint64_t total() const { return total_; }

  // Estimated probability of a full cell given as schema codes; nullopt when the
  // cell is uncovered (some separator count on its path is zero, or N = 0).
  std::optional<double> estimate(std::span<const std::size_t> codes) const;
  // N times the estimate, formed from integer counts so a saturated fit returns
  // the observed count exactly.
  std::optional<long double> expected_count(std::span<const std::size_t> codes) const;

 private:
  friend FittedModel fit_mle(const DecomposableModel&, const ObservedCells&);

  DecomposableModel model_;
  VariableSchema schema_;
  std::vector<ContingencyTable> clique_tables_;
  std::vector<ContingencyTable> separator_tables_;
  // Schema variable indices of each clique / separator, in schema order.
  std::vector<std::vector<std::size_t>> clique_vars_;
  std::vector<std::vector<std::size_t>> separator_vars_;
  std::uint64_t total_ = 0;
};

// The model's vertices must be exactly the schema variables (any order).
FittedModel fit_mle(const DecomposableModel& model, const ContingencyTable& table);
FittedModel fit_mle(const DecomposableModel& model, const ObservedCells& data);

std::optional<double> estimate_cell(const FittedModel& fitted, const Assignment& cell);

std::string export_markov_dot(const DecomposableModel& model);

// Orients each edge away from the later-eliminated endpoint of an elimination
// ordering that eliminates `root` last. Throws ConfigError if `root` is absent.
std::vector<std::pair<std::string, std::string>> bayes_orientation(const DecomposableModel& model,
                                                                   std::string_view root = "tag");
std::string export_bayes_dot(const DecomposableModel& model, std::string_view root = "tag");

// Model file: {"variables": [...], "edges": [[a, b], ...], "cliques": [...]}.
std::string model_to_json(const DecomposableModel& model);
// Reads variables and edges; the optional cliques field is derived and ignored.
InteractionGraph graph_from_json(std::string_view text);

}  // namespace wsd
