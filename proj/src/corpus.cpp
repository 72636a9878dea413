#include "wsd/corpus.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "wsd/error.hpp"
#include "wsd/random.hpp"
#include "wsd/text.hpp"

namespace wsd {

namespace {

constexpr std::string_view kSensePrefix = "sense=";

Token parse_token(std::string_view text, std::size_t line, std::size_t column) {
  if (text.empty()) throw ParseError(line, column, "empty token (tokens are separated by single spaces)");
  const auto fields = split(text, '|');
  if (fields.size() < 2) throw ParseError(line, column, "token '" + std::string(text) + "' has no POS field");
  if (fields[0].empty()) throw ParseError(line, column, "token has an empty form");
  if (fields[1].empty()) throw ParseError(line, column, "token '" + fields[0] + "' has an empty POS");
  Token token{fields[0], fields[1], std::nullopt};
  for (std::size_t f = 2; f < fields.size(); ++f) {
    std::string_view field = fields[f];
    if (field.substr(0, kSensePrefix.size()) != kSensePrefix) {
      throw ParseError(line, column, "unexpected field '" + fields[f] + "' in token '" + fields[0] + "'");
    }
    if (token.sense) throw ParseError(line, column, "duplicate sense annotation on token '" + fields[0] + "'");
    auto label = field.substr(kSensePrefix.size());
    if (label.empty()) throw ParseError(line, column, "empty sense label on token '" + fields[0] + "'");
    token.sense = std::string(label);
  }
  return token;
}

}  // namespace

std::vector<TaggedSentence> parse_corpus(std::string_view text) {
  std::vector<TaggedSentence> sentences;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') {
      TaggedSentence sentence;
      sentence.line = line_no;
      std::size_t pos = 0;
      while (true) {
        const auto space = line.find(' ', pos);
        const auto piece = line.substr(pos, space == std::string_view::npos ? std::string_view::npos : space - pos);
        sentence.tokens.push_back(parse_token(piece, line_no, pos + 1));
        if (space == std::string_view::npos) break;
        pos = space + 1;
      }
      sentences.push_back(std::move(sentence));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return sentences;
}

std::string serialize_corpus(std::span<const TaggedSentence> sentences) {
  std::string out;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto& t = s.tokens[i];
      if (i) out += ' ';
      out += t.form + '|' + t.pos;
      if (t.sense) out += "|" + std::string(kSensePrefix) + *t.sense;
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> Dataset::senses() const {
  std::set<std::string> labels;
  for (const auto& inst : instances)
    if (inst.sense) labels.insert(*inst.sense);
  return {labels.begin(), labels.end()};
}

Dataset collect_instances(std::span<const TaggedSentence> sentences, const std::vector<std::string>& target_forms,
                          const std::vector<std::string>& noun_tags) {
  if (target_forms.empty()) throw ArgumentError("collect_instances needs at least one target form");
  std::set<std::string> targets;
  for (const auto& f : target_forms) targets.insert(to_lower(f));
  const std::set<std::string> nouns(noun_tags.begin(), noun_tags.end());

  Dataset out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sentence = sentences[s];
    bool taken = false;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      const auto& tok = sentence.tokens[i];
      if (!targets.count(to_lower(tok.form)) || !nouns.count(tok.pos)) continue;
      if (!tok.sense) {
        ++out.unannotated_targets;
        continue;
      }
      if (taken) continue;
      InstanceRecord inst;
      inst.id = sentence.line ? "L" + std::to_string(sentence.line) : "S" + std::to_string(s + 1);
      inst.tokens = sentence.tokens;
      inst.target = i;
      inst.sense = tok.sense;
      out.instances.push_back(std::move(inst));
      taken = true;
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, std::size_t n_test, std::uint64_t seed) {
  const auto n = dataset.instances.size();
  if (n_test >= n) {
    throw ArgumentError("test size " + std::to_string(n_test) + " must be smaller than the dataset (" +
                        std::to_string(n) + " instances)");
  }
  std::vector<std::size_t> index(n);
  for (std::size_t i = 0; i < n; ++i) index[i] = i;
  Xoshiro256 rng(seed);
  for (std::size_t i = 0; i < n_test; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(index[i], index[j]);
  }
  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) in_test[index[i]] = true;

  Dataset train, test;
  for (auto* part : {&train, &test}) {
    part->source = dataset.source;
    part->seed = seed;
  }
  for (std::size_t i = 0; i < n; ++i) (in_test[i] ? test : train).instances.push_back(dataset.instances[i]);
  return {std::move(train), std::move(test)};
}

namespace {

struct Conditional {
  std::size_t variable = 0;
  std::vector<std::size_t> parents;  // schema indices, ascending
  std::size_t cardinality = 0;
  std::vector<double> cumulative;  // [parent configuration * cardinality + value]
};

std::vector<std::size_t> bits_of(VarSet set) {
  std::vector<std::size_t> out;
  while (set) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(set)));
    set &= set - 1;
  }
  return out;
}

}  // namespace

std::vector<Codes> synthesize_codes(const FittedModel& fitted, std::size_t n, std::uint64_t seed,
                                    std::string_view root) {
  if (fitted.total() == 0) throw ArgumentError("cannot sample from a model fitted to an empty table");
  for (const auto& sep : fitted.separator_tables()) {
    const auto counts = sep.counts();
    if (std::find(counts.begin(), counts.end(), std::uint64_t{0}) != counts.end()) {
      throw ArgumentError("fitted joint has uncovered cells; cannot sample from it");
    }
  }
  const auto& model = fitted.model();
  const auto& graph = model.graph();
  const auto& schema = fitted.schema();
  const auto order = rooted_elimination_order(graph, graph.find(root));
  if (!order) throw DecomposabilityError("model graph is not chordal");

  std::vector<Conditional> plan;
  VarSet sampled = 0;
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const auto v = *it;
    Conditional cond;
    cond.variable = v;
    cond.parents = bits_of(graph.neighbors(v) & sampled);
    cond.cardinality = schema.cardinality(v);
    const VarSet family = (graph.neighbors(v) & sampled) | (VarSet{1} << v);
    std::size_t clique = 0;
    while ((model.cliques()[clique] & family) != family) ++clique;

    // Positions of the family inside the clique table (both ascending by schema index).
    const auto clique_members = bits_of(model.cliques()[clique]);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < clique_members.size(); ++k)
      if ((family >> clique_members[k]) & 1u) keep.push_back(k);
    const auto marginal = marginalize(fitted.clique_tables()[clique], keep);
    const auto family_members = bits_of(family);

    std::size_t configs = 1;
    for (auto p : cond.parents) configs *= schema.cardinality(p);
    std::vector<double> counts(configs * cond.cardinality, 0.0);
    for (std::uint64_t cell = 0; cell < marginal.cell_count(); ++cell) {
      const auto codes = marginal.schema().cell_codes(cell);
      std::size_t config = 0;
      std::size_t value = 0;
      for (std::size_t k = 0; k < family_members.size(); ++k) {
        if (family_members[k] == v) {
          value = codes[k];
        } else {
          config = config * schema.cardinality(family_members[k]) + codes[k];
        }
      }
      counts[config * cond.cardinality + value] += static_cast<double>(marginal.counts()[cell]);
    }
    cond.cumulative.resize(counts.size());
    for (std::size_t c = 0; c < configs; ++c) {
      double total = 0.0;
      for (std::size_t x = 0; x < cond.cardinality; ++x) total += counts[c * cond.cardinality + x];
      double running = 0.0;
      for (std::size_t x = 0; x < cond.cardinality; ++x) {
        running += counts[c * cond.cardinality + x];
        cond.cumulative[c * cond.cardinality + x] = total > 0 ? running / total : 0.0;
      }
    }
    plan.push_back(std::move(cond));
    sampled |= VarSet{1} << v;
  }

  Xoshiro256 rng(seed);
  std::vector<Codes> draws;
  draws.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Codes row(schema.size(), 0);
    for (const auto& cond : plan) {
      std::size_t config = 0;
      for (auto p : cond.parents) config = config * schema.cardinality(p) + row[p];
      const double u = rng.uniform();
      const double* cdf = &cond.cumulative[config * cond.cardinality];
      std::size_t value = 0;
      while (value + 1 < cond.cardinality && !(u < cdf[value])) ++value;
      row[cond.variable] = value;
    }
    draws.push_back(std::move(row));
  }
  return draws;
}

std::vector<Assignment> synthesize(const FittedModel& fitted, std::size_t n, std::uint64_t seed,
                                   std::string_view root) {
  std::vector<Assignment> out;
  for (const auto& codes : synthesize_codes(fitted, n, seed, root)) out.push_back(decode(fitted.schema(), codes));
  return out;
}

}  // namespace wsd
