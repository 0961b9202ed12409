#include "swd/config_doc.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "swd/error.hpp"

namespace swd::config {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-' || c == '+' ||
         c == '.';
}

/// Cursor over the whole document so that arrays can continue onto following lines.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] char peek() const { return at_end() ? '\0' : text_[pos_]; }

  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  /// Skips blanks on the current line and a trailing comment.
  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') get();
    }
  }

  /// Skips whitespace, newlines and comments (inside arrays).
  void skip_space() {
    for (;;) {
      skip_inline_space();
      if (peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }

  void expect_line_end() {
    skip_inline_space();
    if (at_end()) return;
    if (peek() != '\n') fail(line_, std::string("unexpected character '") + peek() + "'");
    get();
  }

  std::string read_name() {
    std::string out;
    while (!at_end() && is_name_char(peek())) out.push_back(get());
    return out;
  }

  Value read_value(int depth = 0) {
    if (depth > 8) fail(line_, "arrays nested too deeply");
    skip_inline_space();
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      get();
      Value::Array items;
      skip_space();
      if (peek() == ']') {
        get();
        v.data = std::move(items);
        return v;
      }
      for (;;) {
        skip_space();
        items.push_back(read_value(depth + 1));
        skip_space();
        const char sep = at_end() ? '\0' : get();
        if (sep == ']') break;
        if (sep != ',') fail(line_, "expected ',' or ']' in array");
        skip_space();
        if (peek() == ']') {  // trailing comma
          get();
          break;
        }
      }
      v.data = std::move(items);
      return v;
    }
    if (c == '"') {
      get();
      std::string s;
      while (!at_end() && peek() != '"' && peek() != '\n') s.push_back(get());
      if (peek() != '"') fail(v.line, "unterminated string");
      get();
      v.data = std::move(s);
      return v;
    }
    std::string token;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) != 0 || peek() == '.' ||
                         peek() == '-' || peek() == '+' || peek() == '_')) {
      token.push_back(get());
    }
    if (token.empty()) fail(v.line, "expected a value");
    if (token == "true" || token == "false") {
      v.data = token == "true";
      return v;
    }
    const char* first = token.data();
    if (*first == '+') ++first;
    double number = 0.0;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), number);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail(v.line, "invalid value '" + token + "' (strings must be quoted)");
    }
    v.data = number;
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

Document parse_document(std::string_view text) {
  Document doc;
  Reader in(text);
  std::set<std::string> seen_sections;
  std::set<std::string> seen_keys;
  while (!in.at_end()) {
    in.skip_inline_space();
    if (in.peek() == '\n') {
      in.get();
      continue;
    }
    if (in.at_end()) break;
    const std::size_t line = in.line();
    if (in.peek() == '[') {
      in.get();
      in.skip_inline_space();
      std::string name = in.read_name();
      in.skip_inline_space();
      if (name.empty() || in.peek() != ']') fail(line, "malformed section header");
      in.get();
      in.expect_line_end();
      if (!seen_sections.insert(name).second) fail(line, "duplicate section [" + name + "]");
      doc.sections.push_back({std::move(name), line, {}});
      seen_keys.clear();
      continue;
    }
    std::string key = in.read_name();
    if (key.empty()) fail(line, "expected a key or a section header");
    if (doc.sections.empty()) fail(line, "key '" + key + "' outside of any section");
    in.skip_inline_space();
    if (in.peek() != '=') fail(line, "expected '=' after '" + key + "'");
    in.get();
    Value value = in.read_value();
    in.expect_line_end();
    if (!seen_keys.insert(key).second) fail(line, "duplicate key '" + key + "'");
    doc.sections.back().entries.push_back({std::move(key), std::move(value), line});
  }
  return doc;
}

std::string format_shortest(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

std::string format_precise(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return {buf, res.ptr};
}

}  // namespace swd::config
