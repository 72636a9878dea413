#include "wsd/decomposable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wsd/error.hpp"

namespace wsd {

namespace {

using Json = nlohmann::ordered_json;

constexpr VarSet bit(std::size_t v) { return VarSet{1} << v; }

std::vector<std::size_t> members(VarSet set) {
  std::vector<std::size_t> out;
  while (set) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(set)));
    set &= set - 1;
  }
  return out;
}

// Maximum-cardinality search visit order. Ties go to the lexicographically
// smallest name; `first` (if given) is visited first.
std::vector<std::size_t> mcs_visit_order(const InteractionGraph& g, std::optional<std::size_t> first) {
  const auto n = g.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  VarSet visited = 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    int best_weight = -1;
    if (step == 0 && first) {
      best = *first;
    } else {
      for (std::size_t v = 0; v < n; ++v) {
        if (visited & bit(v)) continue;
        const int w = std::popcount(g.neighbors(v) & visited);
        if (w > best_weight || (w == best_weight && g.name(v) < g.name(best))) {
          best = v;
          best_weight = w;
        }
      }
    }
    order.push_back(best);
    visited |= bit(best);
  }
  return order;
}

// True iff every vertex's earlier-visited neighbours form a clique.
bool is_perfect_visit_order(const InteractionGraph& g, const std::vector<std::size_t>& order) {
  std::vector<std::size_t> position(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  VarSet visited = 0;
  for (auto v : order) {
    const VarSet earlier = g.neighbors(v) & visited;
    if (earlier) {
      std::size_t latest = 0;
      std::size_t latest_pos = 0;
      for (auto u : members(earlier)) {
        if (position[u] >= latest_pos) {
          latest_pos = position[u];
          latest = u;
        }
      }
      const VarSet rest = earlier & ~bit(latest);
      if ((rest & g.neighbors(latest)) != rest) return false;
    }
    visited |= bit(v);
  }
  return true;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::string quote(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

// --- InteractionGraph -------------------------------------------------------

InteractionGraph::InteractionGraph(std::vector<std::string> vertices)
    : vertices_(std::move(vertices)), adjacency_(vertices_.size(), 0) {
  if (vertices_.size() > kMaxGraphVertices) {
    throw CapabilityError("interaction graphs support at most " + std::to_string(kMaxGraphVertices) +
                          " vertices");
  }
  std::set<std::string_view> seen;
  for (const auto& v : vertices_) {
    if (!seen.insert(v).second) throw ArgumentError("duplicate vertex '" + v + "'");
  }
}

InteractionGraph::InteractionGraph(std::vector<std::string> vertices,
                                   const std::vector<std::pair<std::string, std::string>>& edges)
    : InteractionGraph(std::move(vertices)) {
  for (const auto& [a, b] : edges) {
    auto ia = find(a);
    auto ib = find(b);
    if (!ia) throw ArgumentError("edge references unknown vertex '" + a + "'");
    if (!ib) throw ArgumentError("edge references unknown vertex '" + b + "'");
    add_edge(*ia, *ib);
  }
}

InteractionGraph InteractionGraph::complete(std::vector<std::string> vertices) {
  InteractionGraph g(std::move(vertices));
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b) g.add_edge(a, b);
  return g;
}

std::optional<std::size_t> InteractionGraph::find(std::string_view name) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i] == name) return i;
  return std::nullopt;
}

void InteractionGraph::add_edge(std::size_t a, std::size_t b) {
  if (a == b) throw ArgumentError("self-loop on vertex '" + vertices_.at(a) + "'");
  adjacency_.at(a) |= bit(b);
  adjacency_.at(b) |= bit(a);
}

void InteractionGraph::remove_edge(std::size_t a, std::size_t b) {
  adjacency_.at(a) &= ~bit(b);
  adjacency_.at(b) &= ~bit(a);
}

std::size_t InteractionGraph::edge_count() const {
  std::size_t twice = 0;
  for (auto adj : adjacency_) twice += static_cast<std::size_t>(std::popcount(adj));
  return twice / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> InteractionGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = a + 1; b < size(); ++b)
      if (has_edge(a, b)) out.emplace_back(a, b);
  return out;
}

std::vector<std::pair<std::string, std::string>> InteractionGraph::named_edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto [a, b] : edges()) {
    auto x = vertices_[a];
    auto y = vertices_[b];
    if (y < x) std::swap(x, y);
    out.emplace_back(std::move(x), std::move(y));
  }
  std::sort(out.begin(), out.end());
  return out;
}

VarSet InteractionGraph::all() const { return size() == 64 ? ~VarSet{0} : bit(size()) - 1; }

std::vector<std::string> InteractionGraph::names(VarSet set) const {
  std::vector<std::string> out;
  for (auto v : members(set)) out.push_back(vertices_[v]);
  return out;
}

// --- chordality ---------------------------------------------------------------

ChordalityResult check_decomposable(const InteractionGraph& graph) {
  auto visit = mcs_visit_order(graph, std::nullopt);
  if (!is_perfect_visit_order(graph, visit)) return {false, {}};
  std::reverse(visit.begin(), visit.end());
  return {true, std::move(visit)};
}

std::optional<std::vector<std::size_t>> rooted_elimination_order(const InteractionGraph& graph,
                                                                 std::optional<std::size_t> root) {
  if (graph.size() == 0) return std::vector<std::size_t>{};
  auto visit = mcs_visit_order(graph, root);
  if (!is_perfect_visit_order(graph, visit)) return std::nullopt;
  std::reverse(visit.begin(), visit.end());
  return visit;
}

// --- junction tree ------------------------------------------------------------

DecomposableModel junction_tree(const InteractionGraph& graph) {
  const auto visit = mcs_visit_order(graph, std::nullopt);
  if (!is_perfect_visit_order(graph, visit)) {
    throw DecomposabilityError("interaction graph is not chordal; no decomposable model has this form");
  }

  // Every maximal clique of a chordal graph is some vertex plus its earlier-visited neighbours.
  std::vector<VarSet> candidates;
  VarSet visited = 0;
  for (auto v : visit) {
    candidates.push_back((graph.neighbors(v) & visited) | bit(v));
    visited |= bit(v);
  }
  std::vector<VarSet> cliques;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
      if (i == j) continue;
      const bool subset = (candidates[i] & candidates[j]) == candidates[i];
      if (subset && (candidates[i] != candidates[j] || j < i)) maximal = false;
    }
    if (maximal) cliques.push_back(candidates[i]);
  }

  // Maximum-weight spanning forest over clique intersections (Kruskal, ties by index).
  struct Link {
    int weight;
    std::size_t a, b;
  };
  std::vector<Link> links;
  for (std::size_t a = 0; a < cliques.size(); ++a)
    for (std::size_t b = a + 1; b < cliques.size(); ++b) {
      const int w = std::popcount(cliques[a] & cliques[b]);
      if (w > 0) links.push_back({w, a, b});
    }
  std::stable_sort(links.begin(), links.end(), [](const Link& x, const Link& y) { return x.weight > y.weight; });

  DecomposableModel model;
  model.graph_ = graph;
  model.cliques_ = cliques;
  DisjointSets sets(cliques.size());
  for (const auto& link : links) {
    if (sets.unite(link.a, link.b)) {
      model.tree_edges_.emplace_back(link.a, link.b);
      model.separators_.push_back(cliques[link.a] & cliques[link.b]);
    }
  }
  model.components_ = cliques.size() - model.tree_edges_.size();
  model.elimination_order_.assign(visit.rbegin(), visit.rend());
  return model;
}

std::vector<std::vector<std::string>> DecomposableModel::clique_names() const {
  std::vector<std::vector<std::string>> out;
  for (auto c : cliques_) out.push_back(graph_.names(c));
  return out;
}

std::vector<std::vector<std::string>> DecomposableModel::separator_names() const {
  std::vector<std::vector<std::string>> out;
  for (auto s : separators_) out.push_back(graph_.names(s));
  return out;
}

std::string DecomposableModel::formula() const {
  std::vector<std::string> terms;
  for (auto c : cliques_) {
    auto names = graph_.names(c);
    std::sort(names.begin(), names.end());
    std::string term = "[";
    for (std::size_t i = 0; i < names.size(); ++i) term += (i ? "," : "") + names[i];
    terms.push_back(term + "]");
  }
  std::sort(terms.begin(), terms.end());
  std::string out;
  for (const auto& t : terms) out += t;
  return out;
}

DecomposableModel independence_model(std::vector<std::string> vertices) {
  return junction_tree(InteractionGraph(std::move(vertices)));
}

DecomposableModel saturated_model(std::vector<std::string> vertices) {
  return junction_tree(InteractionGraph::complete(std::move(vertices)));
}

// --- enumeration --------------------------------------------------------------

ModelEnumerator::ModelEnumerator(std::vector<std::string> vertices, std::size_t max_vars)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() > max_vars) {
    throw CapabilityError("exhaustive enumeration over " + std::to_string(vertices_.size()) +
                          " variables exceeds the cap of " + std::to_string(max_vars) +
                          "; use greedy search instead");
  }
  for (std::size_t a = 0; a < vertices_.size(); ++a)
    for (std::size_t b = a + 1; b < vertices_.size(); ++b) pairs_.emplace_back(a, b);
  if (pairs_.size() >= 63) throw CapabilityError("too many vertex pairs to enumerate");
  end_ = std::uint64_t{1} << pairs_.size();
}

std::optional<DecomposableModel> ModelEnumerator::next() {
  while (mask_ < end_) {
    InteractionGraph g(vertices_);
    for (std::size_t k = 0; k < pairs_.size(); ++k)
      if ((mask_ >> k) & 1u) g.add_edge(pairs_[k].first, pairs_[k].second);
    ++mask_;
    if (check_decomposable(g).chordal) return junction_tree(g);
  }
  return std::nullopt;
}

std::vector<DecomposableModel> enumerate_models(const VariableSchema& schema, std::size_t max_vars) {
  ModelEnumerator models(schema.names(), max_vars);
  std::vector<DecomposableModel> out;
  while (auto m = models.next()) out.push_back(std::move(*m));
  return out;
}

// --- fitting ------------------------------------------------------------------

FittedModel fit_mle(const DecomposableModel& model, const ContingencyTable& table) {
  return fit_mle(model, ObservedCells::from_table(table));
}

FittedModel fit_mle(const DecomposableModel& model, const ObservedCells& data) {
  const auto& schema = data.schema();
  const auto& vertices = model.graph().vertices();
  if (vertices.size() != schema.size()) {
    throw ArgumentError("model has " + std::to_string(vertices.size()) + " variables, table has " +
                        std::to_string(schema.size()));
  }
  for (const auto& v : vertices) {
    if (!schema.find(v)) throw ArgumentError("model variable '" + v + "' is not in the table schema");
  }

  FittedModel fitted;
  const auto names = schema.names();
  fitted.model_ = vertices == names ? model : junction_tree(InteractionGraph(names, model.graph().named_edges()));
  fitted.schema_ = schema;
  fitted.total_ = data.total();
  for (auto c : fitted.model_.cliques()) {
    auto vars = members(c);
    fitted.clique_tables_.push_back(data.marginal(vars));
    fitted.clique_vars_.push_back(std::move(vars));
  }
  for (auto s : fitted.model_.separators()) {
    auto vars = members(s);
    fitted.separator_tables_.push_back(data.marginal(vars));
    fitted.separator_vars_.push_back(std::move(vars));
  }
  return fitted;
}

std::optional<double> FittedModel::estimate(std::span<const std::size_t> codes) const {
  if (codes.size() != schema_.size()) throw ArgumentError("cell must assign every variable");
  if (total_ == 0) return std::nullopt;
  const long double n = static_cast<long double>(total_);
  Codes sub;
  auto lookup = [&](const ContingencyTable& table, const std::vector<std::size_t>& vars) {
    sub.resize(vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) sub[k] = codes[vars[k]];
    return table.count(sub);
  };

  long double denominator = 1.0L;
  for (std::size_t s = 0; s < separator_tables_.size(); ++s) {
    const auto count = lookup(separator_tables_[s], separator_vars_[s]);
    if (count == 0) return std::nullopt;
    denominator *= static_cast<long double>(count) / n;
  }
  long double numerator = 1.0L;
  for (std::size_t c = 0; c < clique_tables_.size(); ++c) {
    const auto count = lookup(clique_tables_[c], clique_vars_[c]);
    if (count == 0) return 0.0;
    numerator *= static_cast<long double>(count) / n;
  }
  return static_cast<double>(numerator / denominator);
}

std::optional<long double> FittedModel::expected_count(std::span<const std::size_t> codes) const {
  if (codes.size() != schema_.size()) throw ArgumentError("cell must assign every variable");
  if (total_ == 0) return std::nullopt;
  Codes sub;
  auto lookup = [&](const ContingencyTable& table, const std::vector<std::size_t>& vars) {
    sub.resize(vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) sub[k] = codes[vars[k]];
    return table.count(sub);
  };
  long double denominator = 1.0L;
  for (std::size_t s = 0; s < separator_tables_.size(); ++s) {
    const auto count = lookup(separator_tables_[s], separator_vars_[s]);
    if (count == 0) return std::nullopt;
    denominator *= static_cast<long double>(count);
  }
  long double numerator = 1.0L;
  for (std::size_t c = 0; c < clique_tables_.size(); ++c) {
    const auto count = lookup(clique_tables_[c], clique_vars_[c]);
    if (count == 0) return 0.0L;
    numerator *= static_cast<long double>(count);
  }
  const int power = 1 + static_cast<int>(separator_tables_.size()) - static_cast<int>(clique_tables_.size());
  return numerator / denominator * std::pow(static_cast<long double>(total_), power);
}

std::optional<double> estimate_cell(const FittedModel& fitted, const Assignment& cell) {
  if (cell.size() != fitted.schema().size()) throw ArgumentError("estimate_cell needs a full assignment");
  return fitted.estimate(encode(fitted.schema(), cell));
}

// --- exports ------------------------------------------------------------------

std::string export_markov_dot(const DecomposableModel& model) {
  const auto& g = model.graph();
  auto nodes = g.vertices();
  std::sort(nodes.begin(), nodes.end());
  std::ostringstream out;
  out << "graph model {\n";
  for (const auto& v : nodes) out << "  " << quote(v) << ";\n";
  for (const auto& [a, b] : g.named_edges()) out << "  " << quote(a) << " -- " << quote(b) << ";\n";
  out << "}\n";
  return out.str();
}

std::vector<std::pair<std::string, std::string>> bayes_orientation(const DecomposableModel& model,
                                                                   std::string_view root) {
  const auto& g = model.graph();
  const auto r = g.find(root);
  if (!r) throw ConfigError("root variable '" + std::string(root) + "' is not in the model");
  const auto order = rooted_elimination_order(g, r);
  if (!order) throw DecomposabilityError("model graph is not chordal");
  std::vector<std::size_t> position(g.size());
  for (std::size_t i = 0; i < order->size(); ++i) position[(*order)[i]] = i;

  std::vector<std::pair<std::string, std::string>> arcs;
  for (auto [a, b] : g.edges()) {
    if (position[a] > position[b]) {
      arcs.emplace_back(g.name(a), g.name(b));
    } else {
      arcs.emplace_back(g.name(b), g.name(a));
    }
  }
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

std::string export_bayes_dot(const DecomposableModel& model, std::string_view root) {
  const auto arcs = bayes_orientation(model, root);
  auto nodes = model.graph().vertices();
  std::sort(nodes.begin(), nodes.end());
  std::ostringstream out;
  out << "digraph model {\n";
  for (const auto& v : nodes) out << "  " << quote(v) << ";\n";
  for (const auto& [from, to] : arcs) out << "  " << quote(from) << " -> " << quote(to) << ";\n";
  out << "}\n";
  return out.str();
}

std::string model_to_json(const DecomposableModel& model) {
  Json j;
  j["variables"] = model.graph().vertices();
  Json edges = Json::array();
  for (const auto& [a, b] : model.graph().named_edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["cliques"] = model.clique_names();
  return j.dump(2) + "\n";
}

InteractionGraph graph_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ArgumentError(std::string("malformed model file: ") + e.what());
  }
  try {
    auto vertices = j.at("variables").get<std::vector<std::string>>();
    std::vector<std::pair<std::string, std::string>> edges;
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw ArgumentError("model edges must be pairs of variable names");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
    return InteractionGraph(std::move(vertices), edges);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace wsd
