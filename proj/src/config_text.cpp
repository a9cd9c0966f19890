#include "graspguard/config_text.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "graspguard/error.hpp"

namespace graspguard {

std::string ConfigValue::kind_name() const {
  switch (kind) {
    case Kind::boolean: return "boolean";
    case Kind::number: return "number";
    case Kind::string: return "string";
    case Kind::array: return "array";
  }
  return "?";
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  std::map<std::string, ConfigValue> run() {
    std::map<std::string, ConfigValue> out;
    std::set<std::string> tables;
    std::string prefix;
    while (!eof()) {
      skip_blank_and_comments();
      if (eof()) break;
      if (peek() == '[') {
        const int table_line = line_;
        ++pos_;
        skip_inline_space();
        std::string name = read_key();
        skip_inline_space();
        expect(']');
        end_of_line();
        if (!tables.insert(name).second) fail_at(table_line, "table [" + name + "] defined twice");
        prefix = name + ".";
        continue;
      }
      const int key_line = line_;
      std::string key = read_key();
      skip_inline_space();
      expect('=');
      skip_inline_space();
      ConfigValue v = read_value();
      v.line = key_line;
      end_of_line();
      const std::string full = prefix + key;
      if (out.count(full)) fail_at(key_line, "key '" + full + "' defined twice");
      out.emplace(full, std::move(v));
    }
    return out;
  }

 private:
  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(line_, msg); }

  [[noreturn]] void fail_at(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_and_comments() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  static bool key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }

  std::string read_key() {
    const std::size_t start = pos_;
    while (!eof() && key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    std::string key = text_.substr(start, pos_ - start);
    if (key.front() == '.' || key.back() == '.' || key.find("..") != std::string::npos)
      fail("malformed key '" + key + "'");
    return key;
  }

  ConfigValue read_value() {
    ConfigValue v;
    const char c = peek();
    if (c == '"') {
      v.kind = ConfigValue::Kind::string;
      v.string = read_string();
    } else if (c == '[') {
      v.kind = ConfigValue::Kind::array;
      ++pos_;
      while (true) {
        skip_blank_and_comments();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        ConfigValue item = read_value();
        if (item.kind == ConfigValue::Kind::array) fail("nested arrays are not supported");
        item.line = line_;
        v.items.push_back(std::move(item));
        skip_blank_and_comments();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    } else {
      const std::size_t start = pos_;
      while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
             peek() != '#')
        ++pos_;
      const std::string word = text_.substr(start, pos_ - start);
      if (word.empty()) fail("expected a value");
      if (word == "true" || word == "false") {
        v.kind = ConfigValue::Kind::boolean;
        v.boolean = word == "true";
      } else {
        v.kind = ConfigValue::Kind::number;
        v.number = parse_number(word);
        for (char ch : word)
          if (ch != '_') v.raw += ch;
      }
    }
    return v;
  }

  double parse_number(std::string word) const {
    std::string clean;
    for (char ch : word)
      if (ch != '_') clean += ch;
    bool neg = false;
    std::string body = clean;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      neg = body[0] == '-';
      body = body.substr(1);
    }
    if (body == "inf") return neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    double out = 0.0;
    const auto res = std::from_chars(body.data(), body.data() + body.size(), out);
    if (body.empty() || res.ec != std::errc() || res.ptr != body.data() + body.size())
      fail("'" + word + "' is not a number, boolean or quoted string");
    return neg ? -out : out;
  }

  std::string read_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }
};

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  doc.source_ = source;
  doc.entries_ = Parser(text, source).run();
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

const ConfigValue& ConfigDocument::at(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  return it->second;
}

std::string ConfigDocument::where(const std::string& key) const {
  const auto it = entries_.find(key);
  return source_ + ":" + (it == entries_.end() ? std::string("?") : std::to_string(it->second.line));
}

}  // namespace graspguard
