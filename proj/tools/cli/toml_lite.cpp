#include "cli/toml_lite.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "dopclust/io.hpp"

namespace dopclust::cli {

namespace {

using json = nlohmann::ordered_json;

class Parser {
 public:
  Parser(std::string_view text, int line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("toml line " + std::to_string(line_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> parts;
    while (true) {
      skip_space();
      if (pos_ < text_.size() && (text_[pos_] == '"' || text_[pos_] == '\'')) {
        parts.push_back(string_value());
      } else {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-')) {
          ++pos_;
        }
        if (start == pos_) fail("expected a key");
        parts.emplace_back(text_.substr(start, pos_ - start));
      }
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '.') {
        ++pos_;
        continue;
      }
      return parts;
    }
  }

  json value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') return array_value();
    if (c == '{') fail("inline tables are not supported");
    return scalar_value();
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string string_value() {
    const char quote = text_[pos_++];
    if (text_.substr(pos_, 2) == std::string(2, quote)) fail("multi-line strings are not supported");
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      char c = text_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (quote == '"' && c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        switch (text_[pos_++]) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail("unsupported escape sequence");
        }
      }
      out += c;
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json array_value() {
    ++pos_;
    json arr = json::array();
    while (true) {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value());
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
      } else if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return arr;
      } else {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json scalar_value() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '#' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token == "true") return true;
    if (token == "false") return false;
    if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    std::erase(token, '_');
    if (!token.empty() && token.front() == '+') token.erase(0, 1);
    long long i = 0;
    if (io::parse_int(token, i)) return i;
    double d = 0.0;
    if (io::parse_double(token, d)) return d;
    fail("invalid value '" + std::string(text_.substr(start, pos_ - start)) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

json& descend(json& root, const std::vector<std::string>& path, std::size_t count, int line) {
  json* node = &root;
  for (std::size_t i = 0; i < count; ++i) {
    json& next = (*node)[path[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("toml line " + std::to_string(line) + ": '" + path[i] + "' is not a table");
    node = &next;
  }
  return *node;
}

int bracket_depth(std::string_view s) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

}  // namespace

nlohmann::ordered_json parse_toml(std::string_view text) {
  json root = json::object();
  std::vector<std::string> table;

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    lines.emplace_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    std::string stmt = lines[li];
    Parser probe(stmt, line_no);
    if (probe.at_end()) continue;

    const auto first = stmt.find_first_not_of(" \t");
    if (stmt[first] == '[') {
      Parser p(std::string_view(stmt).substr(first + 1), line_no);
      if (!stmt.empty() && first + 1 < stmt.size() && stmt[first + 1] == '[') p.fail("arrays of tables are not supported");
      table = p.key_path();
      p.expect(']');
      if (!p.at_end()) p.fail("trailing characters after table header");
      json& node = descend(root, table, table.size(), line_no);
      (void)node;
      continue;
    }

    // Arrays may continue over several lines.
    while (bracket_depth(stmt) > 0 && li + 1 < lines.size()) stmt += "\n" + lines[++li];

    Parser p(stmt, line_no);
    auto key = p.key_path();
    p.expect('=');
    json v = p.value();
    if (!p.at_end()) p.fail("trailing characters after value");

    std::vector<std::string> full = table;
    full.insert(full.end(), key.begin(), key.end());
    json& parent = descend(root, full, full.size() - 1, line_no);
    if (parent.contains(full.back())) p.fail("duplicate key '" + full.back() + "'");
    parent[full.back()] = std::move(v);
  }
  return root;
}

}  // namespace dopclust::cli
