#pragma once

// Sense-annotated, POS-tagged corpora.
//
// Format: UTF-8, one sentence per line, '#' starts a comment line, tokens
// separated by single spaces. A token is `form|POS` or `form|POS|sense=<label>`;
// '|' may not appear inside a field.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsd/decomposable.hpp"
#include "wsd/features.hpp"

namespace wsd {

struct TaggedSentence {
  std::vector<Token> tokens;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory

  bool operator==(const TaggedSentence& other) const { return tokens == other.tokens; }
};

std::vector<TaggedSentence> parse_corpus(std::string_view text);
std::string serialize_corpus(std::span<const TaggedSentence> sentences);

struct Dataset {
  std::vector<InstanceRecord> instances;
  std::string source;
  std::uint64_t seed = 0;
  // Target occurrences that matched the form and noun filter but had no sense annotation.
  std::size_t unannotated_targets = 0;

  std::vector<std::string> senses() const;
};

// One instance per sentence holding an annotated target token (form compared
// case-insensitively) whose POS is in `noun_tags`; only the first such token
// counts. Instance ids are "L<line>" (or "S<index>" for in-memory sentences).
Dataset collect_instances(std::span<const TaggedSentence> sentences, const std::vector<std::string>& target_forms,
                          const std::vector<std::string>& noun_tags);

// Seeded uniform sample of `n_test` instances without replacement: a partial
// Fisher-Yates shuffle of instance indices driven by Xoshiro256(seed). Both
// parts keep the input order.
std::pair<Dataset, Dataset> split(const Dataset& dataset, std::size_t n_test, std::uint64_t seed);

// N independent draws from the fitted joint by ancestral sampling along the
// model's directed orientation (rooted at `root` when present). Throws
// ArgumentError when the fitted joint has uncovered cells.
std::vector<Codes> synthesize_codes(const FittedModel& fitted, std::size_t n, std::uint64_t seed,
                                    std::string_view root = "tag");
std::vector<Assignment> synthesize(const FittedModel& fitted, std::size_t n, std::uint64_t seed,
                                   std::string_view root = "tag");

}  // namespace wsd
