#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swd::config {

/// One value of a scenario document: number, quoted string, boolean or (nested) array.
struct Value {
  using Array = std::vector<Value>;
  std::variant<double, std::string, bool, Array> data;
  std::size_t line = 0;

  [[nodiscard]] bool is_number() const { return std::holds_alternative<double>(data); }
  [[nodiscard]] bool is_string() const { return std::holds_alternative<std::string>(data); }
  [[nodiscard]] bool is_bool() const { return std::holds_alternative<bool>(data); }
  [[nodiscard]] bool is_array() const { return std::holds_alternative<Array>(data); }
};

struct Entry {
  std::string key;
  Value value;
  std::size_t line = 0;
};

struct Section {
  std::string name;  // "system", "subsystem.u1", ...
  std::size_t line = 0;
  std::vector<Entry> entries;
};

struct Document {
  std::vector<Section> sections;
};

/// Parses the flat `[section]` / `key = value` format. `#` starts a comment, arrays may
/// span lines. Throws Error(ParseError) with the offending line number.
[[nodiscard]] Document parse_document(std::string_view text);

/// Shortest-round-trip decimal text for numbers written by hand (labels, keys).
[[nodiscard]] std::string format_shortest(double value);

/// 17 significant digits, '.' separator, independent of the locale.
[[nodiscard]] std::string format_precise(double value);

}  // namespace swd::config
