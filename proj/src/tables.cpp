#include "wsd/tables.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "wsd/error.hpp"

namespace wsd {

namespace {

using Json = nlohmann::ordered_json;

// Row-major strides of `schema`, or throws when q overflows the dense limit.
std::vector<std::uint64_t> strides_of(const VariableSchema& schema) {
  std::vector<std::uint64_t> strides(schema.size());
  std::uint64_t stride = 1;
  for (std::size_t i = schema.size(); i-- > 0;) {
    strides[i] = stride;
    stride *= schema.cardinality(i);
  }
  return strides;
}

}  // namespace

VariableSchema::VariableSchema(std::vector<Variable> variables) : variables_(std::move(variables)) {
  std::set<std::string_view> names;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw SchemaError("variable with empty name");
    if (!names.insert(v.name).second) throw SchemaError("duplicate variable '" + v.name + "'");
    if (v.values.size() < 2)
      throw SchemaError("variable '" + v.name + "' needs at least two values");
    std::set<std::string_view> labels;
    for (const auto& label : v.values) {
      if (!labels.insert(label).second)
        throw SchemaError("variable '" + v.name + "' repeats value '" + label + "'");
    }
  }
}

std::vector<std::string> VariableSchema::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

std::optional<std::size_t> VariableSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t VariableSchema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw SchemaError("unknown variable '" + std::string(name) + "'");
}

std::size_t VariableSchema::value_index(std::size_t variable, std::string_view label) const {
  const auto& values = variables_.at(variable).values;
  auto it = std::find(values.begin(), values.end(), label);
  if (it == values.end()) {
    throw SchemaError("unknown value '" + std::string(label) + "' for variable '" +
                      variables_[variable].name + "'");
  }
  return static_cast<std::size_t>(it - values.begin());
}

std::uint64_t VariableSchema::cell_count() const {
  std::uint64_t q = 1;
  for (const auto& v : variables_) {
    const std::uint64_t card = v.values.size();
    if (q > UINT64_MAX / card) throw CapabilityError("cell count overflows 64 bits");
    q *= card;
  }
  return q;
}

std::uint64_t VariableSchema::cell_index(std::span<const std::size_t> codes) const {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) index = index * variables_[i].values.size() + codes[i];
  return index;
}

Codes VariableSchema::cell_codes(std::uint64_t index) const {
  Codes codes(variables_.size());
  for (std::size_t i = variables_.size(); i-- > 0;) {
    const auto card = variables_[i].values.size();
    codes[i] = static_cast<std::size_t>(index % card);
    index /= card;
  }
  return codes;
}

VariableSchema VariableSchema::restrict(std::span<const std::size_t> keep) const {
  std::vector<Variable> vars;
  vars.reserve(keep.size());
  for (auto i : keep) vars.push_back(variables_.at(i));
  return VariableSchema(std::move(vars));
}

VariableSchema VariableSchema::with_values(std::size_t variable, std::vector<std::string> values) const {
  auto vars = variables_;
  vars.at(variable).values = std::move(values);
  return VariableSchema(std::move(vars));
}

Assignment::Assignment(std::initializer_list<std::pair<std::string, std::string>> pairs) {
  for (const auto& [var, value] : pairs) set(var, value);
}

void Assignment::set(std::string variable, std::string value) {
  if (contains(variable)) throw ArgumentError("variable '" + variable + "' assigned twice");
  pairs_.emplace_back(std::move(variable), std::move(value));
}

std::optional<std::string_view> Assignment::get(std::string_view variable) const {
  for (const auto& [var, value] : pairs_) {
    if (var == variable) return std::string_view(value);
  }
  return std::nullopt;
}

Codes encode(const VariableSchema& schema, const Assignment& assignment) {
  Codes codes(schema.size());
  std::vector<bool> seen(schema.size(), false);
  for (const auto& [var, value] : assignment.pairs()) {
    const auto i = schema.index_of(var);
    codes[i] = schema.value_index(i, value);
    seen[i] = true;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!seen[i]) throw SchemaError("assignment is missing variable '" + schema[i].name + "'");
  }
  return codes;
}

Assignment decode(const VariableSchema& schema, std::span<const std::size_t> codes) {
  Assignment out;
  for (std::size_t i = 0; i < schema.size(); ++i) out.set(schema[i].name, schema[i].values.at(codes[i]));
  return out;
}

ContingencyTable::ContingencyTable(VariableSchema schema, std::vector<std::uint64_t> counts)
    : schema_(std::move(schema)), counts_(std::move(counts)) {
  if (schema_.cell_count() != counts_.size()) {
    throw ArgumentError("count vector has " + std::to_string(counts_.size()) + " cells, schema needs " +
                        std::to_string(schema_.cell_count()));
  }
  for (auto c : counts_) total_ += c;
}

ContingencyTable ContingencyTable::zeros(VariableSchema schema) {
  const auto q = schema.cell_count();
  if (q > kMaxDenseCells) {
    throw CapabilityError("dense table of " + std::to_string(q) + " cells exceeds the limit of " +
                          std::to_string(kMaxDenseCells));
  }
  return ContingencyTable(std::move(schema), std::vector<std::uint64_t>(q, 0));
}

std::uint64_t ContingencyTable::count(const Assignment& cell) const {
  const auto codes = encode(schema_, cell);
  return count(codes);
}

ContingencyTable build_table(std::span<const Assignment> instances, const VariableSchema& schema) {
  std::vector<Codes> rows;
  rows.reserve(instances.size());
  for (const auto& a : instances) rows.push_back(encode(schema, a));
  return build_table(schema, rows);
}

ContingencyTable build_table(const VariableSchema& schema, std::span<const Codes> rows) {
  auto table = ContingencyTable::zeros(schema);
  std::vector<std::uint64_t> counts(table.counts().begin(), table.counts().end());
  for (const auto& row : rows) {
    if (row.size() != schema.size()) throw ArgumentError("row width does not match schema");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] >= schema.cardinality(i)) {
        throw SchemaError("value code out of range for variable '" + schema[i].name + "'");
      }
    }
    ++counts[schema.cell_index(row)];
  }
  return ContingencyTable(schema, std::move(counts));
}

ContingencyTable marginalize(const ContingencyTable& table, const std::vector<std::string>& keep) {
  if (keep.empty()) throw ArgumentError("marginalize needs a non-empty keep set");
  std::vector<std::size_t> indices;
  for (const auto& name : keep) {
    auto i = table.schema().find(name);
    if (!i) throw ArgumentError("cannot keep unknown variable '" + name + "'");
    indices.push_back(*i);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return marginalize(table, indices);
}

ContingencyTable marginalize(const ContingencyTable& table, std::span<const std::size_t> keep) {
  if (keep.empty()) throw ArgumentError("marginalize needs a non-empty keep set");
  const auto& schema = table.schema();
  auto target = ContingencyTable::zeros(schema.restrict(keep));
  std::vector<std::uint64_t> out(target.cell_count(), 0);

  // Walk source cells in row-major order with an odometer, tracking the target index incrementally.
  const auto target_strides = strides_of(target.schema());
  std::vector<std::uint64_t> contribution(schema.size(), 0);
  for (std::size_t k = 0; k < keep.size(); ++k) contribution[keep[k]] = target_strides[k];

  Codes codes(schema.size(), 0);
  std::uint64_t target_index = 0;
  const auto counts = table.counts();
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    out[target_index] += counts[cell];
    for (std::size_t i = schema.size(); i-- > 0;) {
      if (++codes[i] < schema.cardinality(i)) {
        target_index += contribution[i];
        break;
      }
      codes[i] = 0;
      target_index -= contribution[i] * (schema.cardinality(i) - 1);
    }
  }
  return ContingencyTable(target.schema(), std::move(out));
}

ObservedCells ObservedCells::from_rows(VariableSchema schema, std::span<const Codes> rows) {
  std::map<Codes, std::uint64_t> grouped;
  for (const auto& row : rows) {
    if (row.size() != schema.size()) throw ArgumentError("row width does not match schema");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] >= schema.cardinality(i)) {
        throw SchemaError("value code out of range for variable '" + schema[i].name + "'");
      }
    }
    ++grouped[row];
  }
  ObservedCells out;
  out.schema_ = std::move(schema);
  for (auto& [codes, count] : grouped) {
    out.cells_.push_back(codes);
    out.counts_.push_back(count);
    out.total_ += count;
  }
  return out;
}

ObservedCells ObservedCells::from_table(const ContingencyTable& table) {
  ObservedCells out;
  out.schema_ = table.schema();
  const auto counts = table.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    out.cells_.push_back(table.schema().cell_codes(i));
    out.counts_.push_back(counts[i]);
    out.total_ += counts[i];
  }
  return out;
}

ContingencyTable ObservedCells::marginal(std::span<const std::size_t> keep) const {
  if (keep.empty()) throw ArgumentError("marginal needs a non-empty keep set");
  auto target = ContingencyTable::zeros(schema_.restrict(keep));
  std::vector<std::uint64_t> out(target.cell_count(), 0);
  Codes sub(keep.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (std::size_t k = 0; k < keep.size(); ++k) sub[k] = cells_[c][keep[k]];
    out[target.schema().cell_index(sub)] += counts_[c];
  }
  return ContingencyTable(target.schema(), std::move(out));
}

ObservedCells ObservedCells::project(std::span<const std::size_t> keep) const {
  std::map<Codes, std::uint64_t> grouped;
  Codes sub(keep.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (std::size_t k = 0; k < keep.size(); ++k) sub[k] = cells_[c][keep[k]];
    grouped[sub] += counts_[c];
  }
  ObservedCells out;
  out.schema_ = schema_.restrict(keep);
  for (auto& [codes, count] : grouped) {
    out.cells_.push_back(codes);
    out.counts_.push_back(count);
    out.total_ += count;
  }
  return out;
}

namespace {

Json schema_json(const VariableSchema& schema) {
  Json vars = Json::array();
  for (const auto& v : schema.variables()) {
    Json entry;
    entry["name"] = v.name;
    entry["values"] = v.values;
    vars.push_back(std::move(entry));
  }
  Json out;
  out["variables"] = std::move(vars);
  return out;
}

VariableSchema schema_from(const Json& j) {
  std::vector<Variable> vars;
  for (const auto& entry : j.at("variables")) {
    vars.push_back({entry.at("name").get<std::string>(), entry.at("values").get<std::vector<std::string>>()});
  }
  return VariableSchema(std::move(vars));
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ArgumentError(std::string("malformed JSON document: ") + e.what());
  }
}

}  // namespace

std::string table_to_json(const ContingencyTable& table) {
  Json out;
  out["schema"] = schema_json(table.schema());
  out["counts"] = std::vector<std::uint64_t>(table.counts().begin(), table.counts().end());
  return out.dump(2) + "\n";
}

ContingencyTable table_from_json(std::string_view text) {
  const auto j = parse_json(text);
  try {
    return ContingencyTable(schema_from(j.at("schema")), j.at("counts").get<std::vector<std::uint64_t>>());
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed table document: ") + e.what());
  }
}

std::string schema_to_json(const VariableSchema& schema) { return schema_json(schema).dump(2) + "\n"; }

VariableSchema schema_from_json(std::string_view text) {
  const auto j = parse_json(text);
  try {
    return schema_from(j);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed schema document: ") + e.what());
  }
}

}  // namespace wsd
