#pragma once

// Multiway count tables over discrete variables.
//
// Cells are laid out row-major over the declared variable order: the last
// variable varies fastest. Counts are exact integers; probabilities only
// appear downstream of this module.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wsd {

// Value indices of one cell, one entry per schema variable (or per kept variable).
using Codes = std::vector<std::size_t>;

struct Variable {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const Variable&) const = default;
};

// Dense tables above this many cells are refused with a CapabilityError.
inline constexpr std::uint64_t kMaxDenseCells = std::uint64_t{1} << 26;

class VariableSchema {
 public:
  VariableSchema() = default;
  explicit VariableSchema(std::vector<Variable> variables);

  std::size_t size() const { return variables_.size(); }
  bool empty() const { return variables_.empty(); }
  const Variable& operator[](std::size_t i) const { return variables_[i]; }
  const std::vector<Variable>& variables() const { return variables_; }
  std::vector<std::string> names() const;
  std::size_t cardinality(std::size_t i) const { return variables_[i].values.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws SchemaError naming the unknown variable.
  std::size_t index_of(std::string_view name) const;
  // Throws SchemaError naming the variable and the unknown label.
  std::size_t value_index(std::size_t variable, std::string_view label) const;

  // Number of cells q. Throws CapabilityError on 64-bit overflow.
  std::uint64_t cell_count() const;

  std::uint64_t cell_index(std::span<const std::size_t> codes) const;
  Codes cell_codes(std::uint64_t index) const;

  // Schema over the given variable indices, in the order given.
  VariableSchema restrict(std::span<const std::size_t> keep) const;
  // Same schema with one variable's value list replaced.
  VariableSchema with_values(std::size_t variable, std::vector<std::string> values) const;

  bool operator==(const VariableSchema& other) const { return variables_ == other.variables_; }

 private:
  std::vector<Variable> variables_;
};

// A partial or full mapping of variable names to value labels.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<std::string, std::string>> pairs);

  // Throws ArgumentError if the variable is already assigned.
  void set(std::string variable, std::string value);
  std::optional<std::string_view> get(std::string_view variable) const;
  bool contains(std::string_view variable) const { return get(variable).has_value(); }

  std::size_t size() const { return pairs_.size(); }
  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

// Encodes a full assignment against a schema; extra variables are rejected.
Codes encode(const VariableSchema& schema, const Assignment& assignment);
Assignment decode(const VariableSchema& schema, std::span<const std::size_t> codes);

class ContingencyTable {
 public:
  ContingencyTable() = default;
  ContingencyTable(VariableSchema schema, std::vector<std::uint64_t> counts);

  static ContingencyTable zeros(VariableSchema schema);

  const VariableSchema& schema() const { return schema_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  std::size_t cell_count() const { return counts_.size(); }

  std::uint64_t count(std::span<const std::size_t> codes) const {
    return counts_[schema_.cell_index(codes)];
  }
  std::uint64_t count(const Assignment& cell) const;

  bool operator==(const ContingencyTable& other) const {
    return schema_ == other.schema_ && counts_ == other.counts_;
  }

 private:
  VariableSchema schema_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

ContingencyTable build_table(std::span<const Assignment> instances, const VariableSchema& schema);
ContingencyTable build_table(const VariableSchema& schema, std::span<const Codes> rows);

// Sums out every variable not in `keep`. Kept variables retain schema order.
ContingencyTable marginalize(const ContingencyTable& table, const std::vector<std::string>& keep);
ContingencyTable marginalize(const ContingencyTable& table, std::span<const std::size_t> keep);

// The distinct non-empty cells of a table, for schemas whose dense layout is
// too large to materialize. Cells are sorted by code vector.
class ObservedCells {
 public:
  ObservedCells() = default;
  static ObservedCells from_rows(VariableSchema schema, std::span<const Codes> rows);
  static ObservedCells from_table(const ContingencyTable& table);

  const VariableSchema& schema() const { return schema_; }
  const std::vector<Codes>& cells() const { return cells_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }

  // Dense marginal over `keep` (indices into schema, emitted in the order given).
  ContingencyTable marginal(std::span<const std::size_t> keep) const;
  // Restriction to a subset of variables, merging cells that collapse together.
  ObservedCells project(std::span<const std::size_t> keep) const;

 private:
  VariableSchema schema_;
  std::vector<Codes> cells_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Structured-text serialization: schema block, then the flat count vector.
std::string table_to_json(const ContingencyTable& table);
ContingencyTable table_from_json(std::string_view text);

std::string schema_to_json(const VariableSchema& schema);
VariableSchema schema_from_json(std::string_view text);

}  // namespace wsd
