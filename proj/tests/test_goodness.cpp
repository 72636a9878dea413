#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "interest_models.hpp"
#include "wsd/error.hpp"
#include "wsd/goodness.hpp"

using namespace wsd;

namespace {

const VariableSchema kAB({{"a", {"0", "1"}}, {"b", {"0", "1"}}});

VariableSchema binary(const std::vector<std::string>& names) {
  std::vector<Variable> vars;
  for (const auto& n : names) vars.push_back({n, {"0", "1"}});
  return VariableSchema(vars);
}

// G² from an estimate vector, straight from the definition.
double g2_of(const std::vector<std::uint64_t>& counts, const std::vector<double>& p) {
  double n = 0;
  for (auto c : counts) n += double(c);
  double sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (p[i] <= 0) return INFINITY;
    sum += double(counts[i]) * std::log(double(counts[i]) / (n * p[i]));
  }
  return 2 * sum;
}

}  // namespace

TEST_CASE("g_squared examples") {
  SUBCASE("saturated fits exactly") {
    Xoshiro256 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = gen::schema(rng, 1 + rng.below(3), 3);
      const auto t = gen::table(rng, s, 9, 0.3);
      if (t.total() == 0) continue;
      CHECK(g_squared(t, fit_mle(saturated_model(s.names()), t)) == 0.0);
    }
  }
  SUBCASE("diagonal 2x2 under independence") {
    const ContingencyTable diag(kAB, {10, 0, 0, 10});
    const double g2 = g_squared(diag, fit_mle(independence_model({"a", "b"}), diag));
    CHECK(std::abs(g2 - 40.0 * std::log(2.0)) <= 1e-9);
  }
  SUBCASE("observed cell outside the model support") {
    const VariableSchema s = binary({"a", "b", "c"});
    const auto t = ContingencyTable(s, {0, 0, 0, 0, 5, 5, 0, 0});
    const auto f = fit_mle(junction_tree(InteractionGraph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}})), t);
    const auto other = ContingencyTable(s, {1, 0, 0, 0, 5, 5, 0, 0});
    CHECK(std::isinf(g_squared(other, f)));
  }
  SUBCASE("schema mismatch") {
    const ContingencyTable t(kAB, {1, 2, 3, 4});
    const auto f = fit_mle(independence_model({"a", "b"}), t);
    const ContingencyTable u(binary({"a", "c"}), {1, 2, 3, 4});
    CHECK_THROWS_AS(g_squared(u, f), ArgumentError);
  }
}

TEST_CASE("g_squared agrees with IPF estimates") {
  Xoshiro256 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = gen::schema(rng, 2 + rng.below(3), 3);
    const auto t = gen::table(rng, s, 9, 0.0);
    if (t.total() == 0) continue;
    const auto m = junction_tree(gen::chordal_graph(rng, s.names()));
    const auto p = oracle::ipf(gen::grid(s), gen::counts(t), gen::clique_index_lists(m));
    const double expected = g2_of(gen::counts(t), p);
    const double got = g_squared(t, fit_mle(m, t));
    if (std::isinf(expected)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(std::abs(got - expected) <= 1e-6);
    }
  }
}

TEST_CASE("saturated fits give exactly zero") {
  Xoshiro256 rng(33);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = gen::schema(rng, 1 + rng.below(4), 3);
    const auto t = gen::table(rng, s, 9, 0.3);
    if (t.total() == 0) continue;
    const auto r = assess(saturated_model(s.names()), t);
    CHECK(r.g2 == 0.0);
    CHECK(r.df == 0);
    CHECK(r.p_value == 1.0);
  }
}

TEST_CASE("G² is non-negative and zero exactly on perfect fits") {
  Xoshiro256 rng(32);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = gen::schema(rng, 2 + rng.below(2), 3);
    const auto t = gen::table(rng, s, 5, 0.2);
    if (t.total() == 0) continue;
    const auto m = junction_tree(gen::chordal_graph(rng, s.names()));
    const auto f = fit_mle(m, t);
    const double g2 = g_squared(t, f);
    CHECK(g2 >= 0.0);
    bool perfect = true;
    for (std::uint64_t i = 0; i < s.cell_count(); ++i) {
      if (t.counts()[i] == 0) continue;
      const auto e = f.estimate(s.cell_codes(i));
      if (!e || std::abs(*e - double(t.counts()[i]) / double(t.total())) > 1e-12) perfect = false;
    }
    if (perfect) CHECK(g2 <= 1e-9);
    if (g2 <= 1e-12) CHECK(perfect);
  }
}

TEST_CASE("model_df") {
  SUBCASE("saturated") {
    const auto s = VariableSchema({{"a", {"0", "1", "2"}}, {"b", {"0", "1"}}, {"c", {"0", "1", "2", "3"}}});
    CHECK(model_df(saturated_model(s.names()), s) == 0);
  }
  SUBCASE("two-variable independence") {
    for (std::size_t r = 2; r <= 5; ++r)
      for (std::size_t c = 2; c <= 5; ++c) {
        std::vector<std::string> rv, cv;
        for (std::size_t i = 0; i < r; ++i) rv.push_back(std::to_string(i));
        for (std::size_t i = 0; i < c; ++i) cv.push_back(std::to_string(i));
        const VariableSchema s({{"row", rv}, {"col", cv}});
        CHECK(model_df(independence_model({"row", "col"}), s) == std::int64_t((r - 1) * (c - 1)));
      }
  }
  SUBCASE("conditional independence example, all binary") {
    const auto s = binary(models::kExampleVars);
    const auto m = junction_tree(models::example_graph());
    CHECK(model_dimension(m, s) == 23);
    CHECK(model_df(m, s) == 8);
    CHECK(oracle::brute_force_df(gen::grid(s), gen::clique_index_lists(m)) == 8);
  }
  SUBCASE("random models against the rank oracle") {
    Xoshiro256 rng(41);
    for (int rep = 0; rep < 60; ++rep) {
      const auto s = gen::schema(rng, 1 + rng.below(4), 3);
      const auto m = junction_tree(gen::chordal_graph(rng, s.names()));
      CHECK(model_df(m, s) == oracle::brute_force_df(gen::grid(s), gen::clique_index_lists(m)));
    }
  }
  SUBCASE("mismatch") { CHECK_THROWS_AS(model_df(independence_model({"a", "z"}), kAB), ArgumentError); }
}

TEST_CASE("chi_square_sf") {
  CHECK(chi_square_sf(0.0, 1) == 1.0);
  CHECK(chi_square_sf(0.0, 17) == 1.0);
  CHECK(std::abs(chi_square_sf(3.841459, 1) - 0.05) <= 1e-4);
  CHECK(chi_square_sf(27.7259, 1) < 1e-6);
  CHECK(chi_square_sf(0.0, 0) == 1.0);
  CHECK(chi_square_sf(0.5, 0) == 0.0);
  CHECK(chi_square_sf(INFINITY, 3) == 0.0);
  CHECK_THROWS_AS(chi_square_sf(-1.0, 2), ArgumentError);

  SUBCASE("matches numerical integration on a grid") {
    const double xs[] = {0.01, 0.5, 1.0, 2.5, 4.0, 7.5, 12.0, 20.0, 35.0, 60.0};
    const int dfs[] = {1, 2, 5, 12, 30};
    for (double x : xs)
      for (int df : dfs) CHECK(std::abs(chi_square_sf(x, df) - oracle::chi_square_tail(x, df)) <= 1e-8);
  }
  SUBCASE("strictly decreasing in x") {
    for (int df : {1, 2, 3, 8, 25, 100}) {
      double previous = 1.0;
      for (double x = 0.25; x <= 40.0; x += 0.25) {
        const double p = chi_square_sf(x, df);
        // Near 1 the tail saturates in double precision.
        CHECK(p <= previous);
        if (previous < 1.0 - 1e-12) CHECK(p < previous);
        previous = p;
      }
    }
  }
}

TEST_CASE("sparsity_flag") {
  const VariableSchema s = binary({"a", "b", "c"});
  SUBCASE("all positive") {
    CHECK_FALSE(sparsity_flag(saturated_model(s.names()), ContingencyTable(s, {1, 2, 3, 4, 5, 6, 7, 8})));
  }
  SUBCASE("one non-empty cell of eight") {
    CHECK(sparsity_flag(saturated_model(s.names()), ContingencyTable(s, {0, 0, 0, 9, 0, 0, 0, 0}), 0.20));
  }
  SUBCASE("any empty clique cell triggers the expected-count rule") {
    CHECK(sparsity_flag(saturated_model(s.names()), ContingencyTable(s, {0, 1, 1, 1, 1, 1, 1, 1}), 0.5));
  }
  SUBCASE("monotone non-increasing in threshold") {
    Xoshiro256 rng(51);
    for (int rep = 0; rep < 200; ++rep) {
      const auto sc = gen::schema(rng, 2 + rng.below(2), 3);
      const auto t = gen::table(rng, sc, 4, 0.3 * rng.uniform());
      const auto m = junction_tree(gen::chordal_graph(rng, sc.names()));
      bool previous = true;
      for (double thr = 0.0; thr <= 1.0; thr += 0.05) {
        const bool flag = sparsity_flag(m, t, thr);
        CHECK((previous || !flag));
        previous = flag;
      }
    }
  }
}

TEST_CASE("assess") {
  SUBCASE("saturated") {
    const ContingencyTable t(kAB, {3, 5, 7, 9});
    const auto r = assess(saturated_model({"a", "b"}), t);
    CHECK(r.g2 == 0.0);
    CHECK(r.df == 0);
    CHECK(r.p_value == 1.0);
    CHECK(r.param_count == 3);
  }
  SUBCASE("conditional independence example against scripted values") {
    Xoshiro256 rng(61);
    const auto s = binary(models::kExampleVars);
    const auto t = gen::table(rng, s, 20, 0.0);
    const auto m = junction_tree(models::example_graph());
    const auto r = assess(m, t);
    const auto p = oracle::ipf(gen::grid(s), gen::counts(t), gen::clique_index_lists(m));
    const double g2 = g2_of(gen::counts(t), p);
    CHECK(std::abs(r.g2 - g2) <= 1e-6);
    CHECK(r.df == oracle::brute_force_df(gen::grid(s), gen::clique_index_lists(m)));
    CHECK(std::abs(r.p_value - oracle::chi_square_tail(g2, 8)) <= 1e-6);
    CHECK(r.param_count == 23);
    bool any_zero = false;
    for (const auto& clique : gen::clique_index_lists(m)) {
      const auto marg = marginalize(t, std::vector<std::size_t>(clique.begin(), clique.end()));
      for (auto c : marg.counts()) any_zero = any_zero || c == 0;
    }
    CHECK(r.sparse == any_zero);
  }
  SUBCASE("p-values under the null are close to uniform") {
    Xoshiro256 rng(71);
    const VariableSchema s({{"a", {"0", "1"}}, {"b", {"0", "1", "2"}}, {"c", {"0", "1", "2"}}});
    const auto m = independence_model(s.names());
    const auto p = gen::random_joint(rng, s, {{0}, {1}, {2}}, 0.5);
    std::vector<double> pvalues;
    for (int rep = 0; rep < 500; ++rep) pvalues.push_back(assess(m, gen::sample(rng, s, p, 2000)).p_value);
    CHECK(oracle::ks_uniform(pvalues) < 0.1);
  }
}

TEST_CASE("nesting monotonicity over exhaustive enumerations") {
  Xoshiro256 rng(81);
  for (std::size_t d = 2; d <= 4; ++d) {
    const auto s = gen::schema(rng, d, 3);
    const auto t = gen::table(rng, s, 6, 0.0);
    const auto models = enumerate_models(s);
    std::map<std::vector<std::pair<std::size_t, std::size_t>>, FitReport> reports;
    for (const auto& m : models) reports[m.graph().edges()] = assess(m, t);
    for (const auto& m : models) {
      const auto& base = reports[m.graph().edges()];
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
          if (m.graph().has_edge(a, b)) continue;
          auto g = m.graph();
          g.add_edge(a, b);
          auto it = reports.find(g.edges());
          if (it == reports.end()) continue;  // not decomposable
          CHECK(it->second.g2 <= base.g2 + 1e-9);
          CHECK(it->second.df <= base.df);
        }
    }
  }
}

TEST_CASE("search_models") {
  SUBCASE("saturated-only candidate set") {
    const ContingencyTable t(kAB, {3, 5, 7, 9});
    const auto r = rank_models({saturated_model({"a", "b"})}, ObservedCells::from_table(t), {});
    REQUIRE(r.ranked.size() == 1);
    CHECK(r.ranked[0].model == saturated_model({"a", "b"}));
  }
  SUBCASE("exhaustive over too many variables") {
    std::vector<std::string> names = gen::names(7);
    const auto s = binary(names);
    std::vector<Codes> rows = {Codes(7, 0)};
    SearchOptions options;
    CHECK_THROWS_AS(search_models(ObservedCells::from_rows(s, rows), options), CapabilityError);
    options.strategy = SearchStrategy::greedy;
    CHECK_NOTHROW(search_models(ObservedCells::from_rows(s, rows), options));
  }
  SUBCASE("ranking rule") {
    auto ranked = [](bool sparse, double p, std::int64_t params, std::vector<std::string> vars) {
      FitReport r;
      r.sparse = sparse;
      r.p_value = p;
      r.param_count = params;
      return RankedModel{independence_model(vars), r};
    };
    CHECK(ranks_before(ranked(false, 0.01, 9, {"a"}), ranked(true, 0.9, 1, {"a"}), 0.05));
    CHECK(ranks_before(ranked(false, 0.06, 9, {"a"}), ranked(false, 0.04, 1, {"a"}), 0.05));
    CHECK(ranks_before(ranked(false, 0.06, 1, {"a"}), ranked(false, 0.9, 2, {"a"}), 0.05));
    CHECK(ranks_before(ranked(false, 0.9, 1, {"a"}), ranked(false, 0.6, 1, {"a"}), 0.05));
    auto ab = ranked(false, 0.9, 1, {"a"});
    auto bc = ab;
    ab.model = junction_tree(InteractionGraph({"a", "b", "c"}, {{"a", "b"}}));
    bc.model = junction_tree(InteractionGraph({"a", "b", "c"}, {{"b", "c"}}));
    CHECK(ranks_before(ab, bc, 0.05));
    CHECK_FALSE(ranks_before(bc, ab, 0.05));
  }
  SUBCASE("independence data recovers the independence model") {
    Xoshiro256 rng(91);
    const auto s = binary({"x", "y", "z"});
    const auto p = gen::random_joint(rng, s, {{0}, {1}, {2}}, 0.7);
    int first = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto r = search_models(gen::sample(rng, s, p, 5000), SearchOptions{});
      first += r.ranked.front().model.graph().edge_count() == 0;
    }
    CHECK(first >= 90);
  }
  SUBCASE("data from the conditional independence example recovers its generator") {
    Xoshiro256 rng(92);
    const auto s = binary(models::kExampleVars);
    const auto generator = junction_tree(models::example_graph());
    const auto p = gen::random_joint(rng, s, gen::clique_index_lists(generator), 1.0);
    int above = 0;
    for (int rep = 0; rep < 30; ++rep) {
      const auto r = search_models(gen::sample(rng, s, p, 5000), SearchOptions{});
      std::size_t gen_rank = 0, sat_rank = 0, ind_rank = 0;
      for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        const auto& g = r.ranked[i].model.graph();
        if (g == generator.graph()) gen_rank = i;
        if (g.edge_count() == 10) sat_rank = i;
        if (g.edge_count() == 0) ind_rank = i;
      }
      above += gen_rank < sat_rank && gen_rank < ind_rank;
    }
    CHECK(above >= 27);
  }
  SUBCASE("greedy adds edges until the fit is acceptable") {
    Xoshiro256 rng(93);
    const auto s = binary(models::kExampleVars);
    const auto generator = junction_tree(models::example_graph());
    const auto p = gen::random_joint(rng, s, gen::clique_index_lists(generator), 1.0);
    const auto t = gen::sample(rng, s, p, 5000);
    SearchOptions options;
    options.strategy = SearchStrategy::greedy;
    const auto r = search_models(t, options);
    CHECK(r.ranked.size() > 1);
    CHECK(r.ranked.front().report.p_value >= options.alpha);
    for (const auto& m : r.ranked) CHECK(check_decomposable(m.model.graph()).chordal);
    CHECK(format_search_report(r) == format_search_report(search_models(t, options)));
  }
  SUBCASE("report is byte-stable") {
    Xoshiro256 rng(94);
    const auto s = gen::schema(rng, 4, 3);
    const auto t = gen::table(rng, s, 10);
    const auto a = format_search_report(search_models(t, {}));
    const auto b = format_search_report(search_models(t, {}));
    CHECK(a == b);
    CHECK(a.rfind("rank\tmodel\tedges\tg2\tdf\tp_value\tparams\tsparse\n", 0) == 0);
  }
}

TEST_CASE("feature_informativeness") {
  const VariableSchema ft({{"feature", {"absent", "present"}}, {"tag", {"1", "2"}}});
  CHECK(feature_informativeness(ContingencyTable(ft, {2, 4, 3, 6})).g2 == doctest::Approx(0.0).epsilon(1e-12));
  const auto r = feature_informativeness(ContingencyTable(ft, {10, 0, 0, 10}));
  CHECK(std::abs(r.g2 - 40.0 * std::log(2.0)) <= 1e-9);
  CHECK(r.df == 1);
  CHECK_THROWS_AS(feature_informativeness(ContingencyTable(VariableSchema({{"tag", {"1", "2"}}, {"f", {"0", "1"}}}),
                                                           {1, 1, 1, 1})),
                  ArgumentError);
  CHECK_THROWS_AS(feature_informativeness(ContingencyTable(binary({"a", "b", "tag"}), std::vector<std::uint64_t>(8, 1))),
                  ArgumentError);

  SUBCASE("planted dependence strengths are recovered in order") {
    Xoshiro256 rng(95);
    const double strengths[] = {0.0, 0.15, 0.3, 0.45, 0.6};
    int recovered = 0;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> g2;
      for (double st : strengths) {
        // P(present | tag) = 0.5 ± st/2
        const std::vector<double> joint = {0.25 * (1 + st), 0.25 * (1 - st), 0.25 * (1 - st), 0.25 * (1 + st)};
        g2.push_back(feature_informativeness(gen::sample(rng, ft, joint, 600)).g2);
      }
      recovered += std::is_sorted(g2.begin(), g2.end());
    }
    CHECK(recovered >= 90);
  }
}
