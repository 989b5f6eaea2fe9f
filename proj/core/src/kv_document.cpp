#include "flexport/kv_document.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flexport {
namespace {

bool is_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class LineParser {
 public:
  LineParser(const std::string& source, std::string_view line, std::size_t line_no)
      : source_(source), s_(line), line_(line_no) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_, line_, pos_ + 1, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  [[nodiscard]] bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  [[nodiscard]] bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  [[nodiscard]] std::size_t column() const { return pos_ + 1; }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string key() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_key_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  KvValue value(bool allow_array = true) {
    skip_ws();
    KvValue v;
    v.line = line_;
    v.column = pos_ + 1;
    if (pos_ >= s_.size()) fail("expected a value");
    const char c = s_[pos_];
    if (c == '"') {
      v.type = KvValue::Type::string;
      v.string = quoted();
    } else if (c == '[') {
      if (!allow_array) fail("nested arrays are not supported");
      v.type = KvValue::Type::array;
      ++pos_;
      skip_ws();
      if (peek(']')) {
        ++pos_;
        return v;
      }
      for (;;) {
        v.items.push_back(value(false));
        skip_ws();
        if (peek(',')) {
          ++pos_;
          skip_ws();
          if (peek(']')) {
            ++pos_;
            break;
          }
          continue;
        }
        if (peek(']')) {
          ++pos_;
          break;
        }
        fail("expected ',' or ']' in array");
      }
    } else {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
             s_[pos_] != '\t' && s_[pos_] != '\r')
        ++pos_;
      const std::string_view tok = s_.substr(start, pos_ - start);
      if (tok == "true" || tok == "false") {
        v.type = KvValue::Type::boolean;
        v.boolean = tok == "true";
      } else {
        v.type = KvValue::Type::number;
        v.number = number(tok, start);
      }
    }
    return v;
  }

 private:
  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          default:
            --pos_;
            fail(std::string("unknown escape '\\") + e + "'");
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  double number(std::string_view tok, std::size_t start) {
    if (tok == "inf" || tok == "+inf") return HUGE_VAL;
    if (tok == "-inf") return -HUGE_VAL;
    std::string_view body = tok;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != body.data() + body.size()) {
      pos_ = start;
      fail("invalid value '" + std::string(tok) + "'");
    }
    return v;
  }

  const std::string& source_;
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

void KvTable::add(Entry entry) {
  if (lookup(entry.key))
    throw ParseError(source_, entry.value.line, entry.key_column, "duplicate key '" + entry.key + "'");
  entries_.push_back(std::move(entry));
}

const KvTable::Entry* KvTable::lookup(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) {
      e.used = true;
      return &e;
    }
  return nullptr;
}

void KvTable::fail(const std::string& message) const {
  const std::string where = name_.empty() ? "" : "[" + name_ + "] ";
  throw ParseError(source_, line_, 1, where + message);
}

void KvTable::fail_at(std::string_view key, const std::string& message) const {
  const Entry* e = lookup(key);
  if (!e) fail(message);
  throw ParseError(source_, e->value.line, e->value.column, message);
}

const KvValue& KvTable::require(std::string_view key, KvValue::Type type, const char* what) const {
  const Entry* e = lookup(key);
  if (!e) fail("missing key '" + std::string(key) + "'");
  if (e->value.type != type)
    throw ParseError(source_, e->value.line, e->value.column,
                     "key '" + std::string(key) + "' must be " + what);
  return e->value;
}

std::string KvTable::get_string(std::string_view key) const {
  return require(key, KvValue::Type::string, "a string").string;
}

std::string KvTable::get_string(std::string_view key, std::string_view fallback) const {
  return has(key) ? get_string(key) : std::string(fallback);
}

double KvTable::get_number(std::string_view key) const {
  return require(key, KvValue::Type::number, "a number").number;
}

double KvTable::get_number(std::string_view key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

bool KvTable::get_bool(std::string_view key, bool fallback) const {
  return has(key) ? require(key, KvValue::Type::boolean, "a boolean").boolean : fallback;
}

std::vector<std::string> KvTable::get_strings(std::string_view key) const {
  const KvValue& v = require(key, KvValue::Type::array, "an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v.items) {
    if (item.type != KvValue::Type::string)
      throw ParseError(source_, item.line, item.column, "expected a string in '" + std::string(key) + "'");
    out.push_back(item.string);
  }
  return out;
}

std::vector<double> KvTable::get_numbers(std::string_view key) const {
  const KvValue& v = require(key, KvValue::Type::array, "an array of numbers");
  std::vector<double> out;
  for (const auto& item : v.items) {
    if (item.type != KvValue::Type::number)
      throw ParseError(source_, item.line, item.column, "expected a number in '" + std::string(key) + "'");
    out.push_back(item.number);
  }
  return out;
}

void KvTable::reject_unused() const {
  for (const auto& e : entries_)
    if (!e.used) throw ParseError(source_, e.value.line, e.key_column, "unknown key '" + e.key + "'");
}

KvDocument KvDocument::parse(std::string_view text, std::string source) {
  KvDocument doc;
  doc.source_ = source;
  doc.tables_.emplace_back(source, "", 1);
  doc.is_array_.push_back(false);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    LineParser p(source, line, line_no);
    if (p.at_end_or_comment()) continue;
    if (p.peek('[')) {
      p.expect('[');
      const bool array = p.peek('[');
      if (array) p.expect('[');
      const std::string name = p.key();
      p.skip_ws();
      p.expect(']');
      if (array) p.expect(']');
      if (!p.at_end_or_comment()) p.fail("unexpected text after table header");
      if (!array) {
        for (std::size_t i = 0; i < doc.tables_.size(); ++i)
          if (doc.tables_[i].name() == name)
            throw ParseError(source, line_no, 1,
                             doc.is_array_[i] ? "[" + name + "] conflicts with [[" + name + "]]"
                                              : "duplicate table [" + name + "]");
      } else {
        for (std::size_t i = 0; i < doc.tables_.size(); ++i)
          if (doc.tables_[i].name() == name && !doc.is_array_[i])
            throw ParseError(source, line_no, 1, "[[" + name + "]] conflicts with [" + name + "]");
      }
      doc.tables_.emplace_back(source, name, line_no);
      doc.is_array_.push_back(array);
      continue;
    }
    KvTable::Entry entry;
    p.skip_ws();
    entry.key_column = p.column();
    entry.key = p.key();
    p.skip_ws();
    p.expect('=');
    entry.value = p.value();
    if (!p.at_end_or_comment()) p.fail("unexpected text after value");
    doc.tables_.back().add(std::move(entry));
  }
  return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << file.rdbuf();
  const std::string text = ss.str();
  return parse(text, path.string());
}

const KvTable* KvDocument::table(std::string_view name) const {
  for (std::size_t i = 0; i < tables_.size(); ++i)
    if (!is_array_[i] && tables_[i].name() == name && !name.empty()) return &tables_[i];
  return nullptr;
}

std::vector<const KvTable*> KvDocument::array(std::string_view name) const {
  std::vector<const KvTable*> out;
  for (std::size_t i = 0; i < tables_.size(); ++i)
    if (is_array_[i] && tables_[i].name() == name) out.push_back(&tables_[i]);
  return out;
}

void KvDocument::reject_unknown_tables(const std::vector<std::string_view>& singles,
                                       const std::vector<std::string_view>& arrays) const {
  for (std::size_t i = 1; i < tables_.size(); ++i) {
    const auto& known = is_array_[i] ? arrays : singles;
    bool ok = false;
    for (auto k : known) ok = ok || k == tables_[i].name();
    if (!ok) {
      const std::string header =
          is_array_[i] ? "[[" + tables_[i].name() + "]]" : "[" + tables_[i].name() + "]";
      throw ParseError(source_, tables_[i].line(), 1, "unknown table " + header);
    }
  }
}

}  // namespace flexport
