#include "wsd/features.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "wsd/error.hpp"
#include "wsd/text.hpp"

namespace wsd {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> senses_or_observed(std::span<const InstanceRecord> instances,
                                            const std::vector<std::string>& senses) {
  if (!senses.empty()) return senses;
  std::set<std::string> observed;
  for (const auto& inst : instances)
    if (inst.sense) observed.insert(*inst.sense);
  return {observed.begin(), observed.end()};
}

}  // namespace

void FeatureSpec::validate() const {
  std::set<int> offsets;
  for (int o : pos_offsets) {
    if (o == 0) throw ArgumentError("POS offset 0 is the target itself");
    if (!offsets.insert(o).second) throw ArgumentError("duplicate POS offset " + std::to_string(o));
  }
  std::set<std::string> reserved{std::string(kTagVariable), std::string(kEndingVariable)};
  for (int o : pos_offsets) reserved.insert(pos_variable_name(o));
  const auto own = target_forms();
  std::set<std::string> forms;
  for (const auto& f : collocation_forms) {
    if (f.empty()) throw ArgumentError("empty collocation form");
    if (!forms.insert(f).second) throw ArgumentError("duplicate collocation form '" + f + "'");
    if (std::find(own.begin(), own.end(), to_lower(f)) != own.end())
      throw ArgumentError("collocation form '" + f + "' is a form of the target word");
    if (reserved.count(f)) throw ArgumentError("collocation form '" + f + "' collides with a variable name");
  }
}

std::vector<std::string> FeatureSpec::effective_plural_suffixes() const {
  if (!plural_suffixes.empty()) return plural_suffixes;
  return {to_lower(lemma) + "s"};
}

std::vector<std::string> FeatureSpec::target_forms() const {
  std::vector<std::string> forms{to_lower(lemma)};
  for (const auto& s : effective_plural_suffixes()) forms.push_back(to_lower(s));
  return forms;
}

std::string pos_variable_name(int offset) {
  return (offset < 0 ? "l" : "r") + std::to_string(offset < 0 ? -offset : offset) + "pos";
}

std::string_view extract_ending(const InstanceRecord& instance, const FeatureSpec& spec) {
  const auto form = to_lower(instance.target_token().form);
  for (const auto& suffix : spec.effective_plural_suffixes()) {
    if (ends_with(form, to_lower(suffix))) return kPlural;
  }
  return kSingular;
}

std::string extract_pos(const InstanceRecord& instance, int offset,
                        const std::map<std::string, std::string>& collapse_map) {
  const auto position = static_cast<long long>(instance.target) + offset;
  if (position < 0 || position >= static_cast<long long>(instance.tokens.size())) {
    return std::string(kBoundaryLabel);
  }
  const auto& tag = instance.tokens[static_cast<std::size_t>(position)].pos;
  if (auto it = collapse_map.find(tag); it != collapse_map.end()) return it->second;
  return tag.substr(0, 1);
}

bool has_collocation(const InstanceRecord& instance, std::string_view form) {
  const auto wanted = to_lower(form);
  for (std::size_t i = 0; i < instance.tokens.size(); ++i) {
    if (i != instance.target && to_lower(instance.tokens[i].form) == wanted) return true;
  }
  return false;
}

std::vector<std::string> candidate_collocations(std::span<const InstanceRecord> instances, std::size_t k,
                                                const std::vector<std::string>& excluded) {
  std::set<std::string> skip;
  for (const auto& e : excluded) skip.insert(to_lower(e));
  for (const auto& inst : instances) skip.insert(to_lower(inst.target_token().form));

  std::unordered_map<std::string, std::size_t> frequency;
  for (const auto& inst : instances) {
    for (const auto& tok : inst.tokens) {
      auto form = to_lower(tok.form);
      if (!skip.count(form)) ++frequency[form];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(frequency.begin(), frequency.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (auto& [form, count] : ranked) out.push_back(std::move(form));
  return out;
}

std::vector<ScoredForm> rank_collocations(std::span<const InstanceRecord> training,
                                          const std::vector<std::string>& candidates,
                                          const std::vector<std::string>& senses) {
  const auto tags = senses_or_observed(training, senses);
  std::vector<ScoredForm> scored;
  scored.reserve(candidates.size());
  for (const auto& form : candidates) {
    VariableSchema schema({{"feature", {std::string(kAbsent), std::string(kPresent)}}, {"tag", tags}});
    std::vector<Codes> rows;
    rows.reserve(training.size());
    for (const auto& inst : training) {
      if (!inst.sense) throw ArgumentError("training instance '" + inst.id + "' has no sense");
      rows.push_back({has_collocation(inst, form) ? 1u : 0u, schema.value_index(1, *inst.sense)});
    }
    scored.push_back({form, feature_informativeness(build_table(schema, rows))});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredForm& a, const ScoredForm& b) {
    if (a.report.p_value != b.report.p_value) return a.report.p_value < b.report.p_value;
    if (a.report.g2 != b.report.g2) return a.report.g2 > b.report.g2;
    return a.form < b.form;
  });
  return scored;
}

std::vector<ScoredForm> select_collocations(std::span<const InstanceRecord> training,
                                            const std::vector<std::string>& candidates, std::size_t m,
                                            const std::vector<std::string>& senses) {
  auto scored = rank_collocations(training, candidates, senses);
  if (scored.size() > m) scored.resize(m);
  return scored;
}

FeatureMatrix vectorize(std::span<const InstanceRecord> instances, const FeatureSpec& spec,
                        const std::vector<std::string>& senses) {
  spec.validate();
  auto offsets = spec.pos_offsets;
  std::sort(offsets.begin(), offsets.end());

  std::vector<Variable> vars;
  for (const auto& form : spec.collocation_forms) vars.push_back({form, {std::string(kAbsent), std::string(kPresent)}});
  if (!offsets.empty()) {
    std::set<std::string> labels{std::string(kBoundaryLabel)};
    for (const auto& inst : instances)
      for (int o : offsets) labels.insert(extract_pos(inst, o, spec.pos_collapse_map));
    const std::vector<std::string> values(labels.begin(), labels.end());
    for (int o : offsets) vars.push_back({pos_variable_name(o), values});
  }
  if (spec.use_ending) vars.push_back({std::string(kEndingVariable), {std::string(kSingular), std::string(kPlural)}});
  if (spec.include_tag) vars.push_back({std::string(kTagVariable), senses_or_observed(instances, senses)});

  FeatureMatrix out{VariableSchema(std::move(vars)), {}};
  out.rows.reserve(instances.size());
  for (const auto& inst : instances) {
    Assignment row;
    for (const auto& form : spec.collocation_forms)
      row.set(form, std::string(has_collocation(inst, form) ? kPresent : kAbsent));
    for (int o : offsets) row.set(pos_variable_name(o), extract_pos(inst, o, spec.pos_collapse_map));
    if (spec.use_ending) row.set(std::string(kEndingVariable), std::string(extract_ending(inst, spec)));
    if (spec.include_tag) {
      if (!inst.sense) throw ArgumentError("instance '" + inst.id + "' has no gold sense");
      row.set(std::string(kTagVariable), *inst.sense);
    }
    encode(out.schema, row);  // validates labels against the schema
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace wsd
