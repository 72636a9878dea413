#pragma once

// Discrete contextual features of an ambiguous-word usage: the morphological
// ending, part-of-speech tags in a window around the target, and presence or
// absence of selected collocation forms in the same sentence.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsd/goodness.hpp"
#include "wsd/tables.hpp"

namespace wsd {

struct Token {
  std::string form;
  std::string pos;
  std::optional<std::string> sense;

  bool operator==(const Token&) const = default;
};

// One usage of the target word: its sentence and the target position.
struct InstanceRecord {
  std::string id;
  std::vector<Token> tokens;
  std::size_t target = 0;
  std::optional<std::string> sense;

  const Token& target_token() const { return tokens.at(target); }
};

inline constexpr std::string_view kBoundaryLabel = "#BOUNDARY#";
inline constexpr std::string_view kSingular = "singular";
inline constexpr std::string_view kPlural = "plural";
inline constexpr std::string_view kAbsent = "absent";
inline constexpr std::string_view kPresent = "present";
inline constexpr std::string_view kTagVariable = "tag";
inline constexpr std::string_view kEndingVariable = "ending";

struct FeatureSpec {
  std::string lemma = "interest";
  // Lowercased suffixes marking the plural; empty means { lemma + "s" }.
  std::vector<std::string> plural_suffixes;
  bool use_ending = true;
  std::vector<int> pos_offsets;
  std::vector<std::string> collocation_forms;
  // Corpus POS tag -> class label. Unmapped tags collapse to their first character.
  std::map<std::string, std::string> pos_collapse_map;
  bool include_tag = true;

  // Throws ArgumentError on duplicate/zero offsets, duplicate collocation forms, or
  // collocation forms that collide with the target's own forms or reserved names.
  void validate() const;
  std::vector<std::string> effective_plural_suffixes() const;
  // Lowercased forms of the target word itself (lemma and plural forms).
  std::vector<std::string> target_forms() const;
};

// Variable name for a POS window offset: -1 -> "l1pos", +2 -> "r2pos".
std::string pos_variable_name(int offset);

std::string_view extract_ending(const InstanceRecord& instance, const FeatureSpec& spec);
std::string extract_pos(const InstanceRecord& instance, int offset,
                        const std::map<std::string, std::string>& collapse_map = {});
// True iff the lowercased form occurs in the sentence outside the target position.
bool has_collocation(const InstanceRecord& instance, std::string_view form);

// The K most frequent lowercased token forms across the instances' sentences,
// excluding `excluded` forms and each instance's own target form. Ties break
// lexicographically.
std::vector<std::string> candidate_collocations(std::span<const InstanceRecord> instances, std::size_t k,
                                                const std::vector<std::string>& excluded = {});

struct ScoredForm {
  std::string form;
  FitReport report;
};

// Scores every candidate with a presence x tag independence test and orders
// them by ascending p-value, then descending G², then form.
std::vector<ScoredForm> rank_collocations(std::span<const InstanceRecord> training,
                                          const std::vector<std::string>& candidates,
                                          const std::vector<std::string>& senses);
std::vector<ScoredForm> select_collocations(std::span<const InstanceRecord> training,
                                            const std::vector<std::string>& candidates, std::size_t m,
                                            const std::vector<std::string>& senses);

struct FeatureMatrix {
  VariableSchema schema;
  std::vector<Assignment> rows;
};

// Variables in fixed order: collocations (as declared), POS offsets ascending,
// ending, tag. POS variables share one value set: the classes observed at any
// configured offset plus the boundary label. Tag values are `senses`, or the
// sorted observed senses when `senses` is empty.
FeatureMatrix vectorize(std::span<const InstanceRecord> instances, const FeatureSpec& spec,
                        const std::vector<std::string>& senses = {});

}  // namespace wsd
