#pragma once

// Seeded random inputs for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wsd/decomposable.hpp"
#include "wsd/random.hpp"
#include "wsd/tables.hpp"

namespace gen {

inline wsd::VariableSchema schema(wsd::Xoshiro256& rng, std::size_t d, std::size_t max_card) {
  std::vector<wsd::Variable> vars;
  for (std::size_t i = 0; i < d; ++i) {
    wsd::Variable v{"v" + std::to_string(i), {}};
    const std::size_t card = 2 + rng.below(max_card - 1);
    for (std::size_t k = 0; k < card; ++k) v.values.push_back("x" + std::to_string(k));
    vars.push_back(std::move(v));
  }
  return wsd::VariableSchema(std::move(vars));
}

// Counts drawn cell by cell; roughly `zero_rate` of cells are forced empty.
inline wsd::ContingencyTable table(wsd::Xoshiro256& rng, const wsd::VariableSchema& s, std::uint64_t max_count,
                                   double zero_rate = 0.0) {
  std::vector<std::uint64_t> counts(s.cell_count());
  for (auto& c : counts) c = rng.uniform() < zero_rate ? 0 : rng.below(max_count + 1);
  return wsd::ContingencyTable(s, std::move(counts));
}

inline wsd::InteractionGraph graph(wsd::Xoshiro256& rng, const std::vector<std::string>& vertices,
                                   double edge_rate = 0.5) {
  wsd::InteractionGraph g(vertices);
  for (std::size_t a = 0; a < vertices.size(); ++a)
    for (std::size_t b = a + 1; b < vertices.size(); ++b)
      if (rng.uniform() < edge_rate) g.add_edge(a, b);
  return g;
}

inline std::vector<std::vector<bool>> adjacency(const wsd::InteractionGraph& g) {
  std::vector<std::vector<bool>> adj(g.size(), std::vector<bool>(g.size(), false));
  for (auto [a, b] : g.edges()) adj[a][b] = adj[b][a] = true;
  return adj;
}

// Rejection-samples graphs until a chordal one appears (checked by the oracle).
inline wsd::InteractionGraph chordal_graph(wsd::Xoshiro256& rng, const std::vector<std::string>& vertices) {
  for (;;) {
    auto g = graph(rng, vertices);
    if (oracle::is_chordal(static_cast<int>(g.size()), adjacency(g))) return g;
  }
}

inline std::vector<std::vector<int>> clique_index_lists(const wsd::DecomposableModel& m) {
  std::vector<std::vector<int>> out;
  for (auto c : m.cliques()) {
    std::vector<int> vars;
    for (int v = 0; v < 64; ++v)
      if (c >> v & 1u) vars.push_back(v);
    out.push_back(vars);
  }
  return out;
}

inline oracle::Grid grid(const wsd::VariableSchema& s) {
  oracle::Grid g;
  for (std::size_t i = 0; i < s.size(); ++i) g.cards.push_back(static_cast<int>(s.cardinality(i)));
  return g;
}

inline std::vector<std::uint64_t> counts(const wsd::ContingencyTable& t) {
  return {t.counts().begin(), t.counts().end()};
}

// N draws from a dense joint by inverse-CDF lookup.
inline wsd::ContingencyTable sample(wsd::Xoshiro256& rng, const wsd::VariableSchema& s, const std::vector<double>& p,
                                    std::uint64_t n) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = acc += p[i];
  std::vector<std::uint64_t> counts(p.size(), 0);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return wsd::ContingencyTable(s, std::move(counts));
}

// Joint of a decomposable model with random clique potentials, normalised by
// brute force: product of clique factors over all cells.
inline std::vector<double> random_joint(wsd::Xoshiro256& rng, const wsd::VariableSchema& s,
                                        const std::vector<std::vector<int>>& cliques, double spread = 1.0) {
  const auto g = grid(s);
  std::vector<std::map<std::vector<int>, double>> factors(cliques.size());
  std::vector<double> p(g.size(), 1.0);
  double z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto codes = g.decode(i);
    for (std::size_t c = 0; c < cliques.size(); ++c) {
      const auto key = g.project(codes, cliques[c]);
      auto it = factors[c].find(key);
      if (it == factors[c].end()) it = factors[c].emplace(key, std::exp(spread * (2.0 * rng.uniform() - 1.0))).first;
      p[i] *= it->second;
    }
    z += p[i];
  }
  for (auto& v : p) v /= z;
  return p;
}

inline std::vector<std::string> names(std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

}  // namespace gen
