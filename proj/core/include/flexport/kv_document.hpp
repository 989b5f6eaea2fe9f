#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flexport {

// Sectioned key-value text used for system and scenario files:
//
//   # comment
//   key = "value"          keys before any header belong to the root table
//   [system]               a single table
//   wacc = 0.076
//   [[bus]]                one element of the array of tables "bus"
//   id = "north"
//   tags = ["a", "b"]      single-line arrays
//
// Values are double-quoted strings (\" \\ \n \t escapes), numbers (inf
// allowed), true / false, or arrays of these.

/// Error with a 1-based source position; what() reads
/// "<source>:<line>:<column>: <message>".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& message);
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct KvValue {
  enum class Type { boolean, number, string, array };
  Type type = Type::number;
  bool boolean = false;
  double number = 0.0;
  std::string string;
  std::vector<KvValue> items;
  std::size_t line = 0;
  std::size_t column = 0;
};

class KvTable {
 public:
  struct Entry {
    std::string key;
    KvValue value;
    std::size_t key_column = 0;
    mutable bool used = false;
  };

  KvTable(std::string source, std::string name, std::size_t line) :
      source_(std::move(source)), name_(std::move(name)), line_(line) {}

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  [[nodiscard]] bool has(std::string_view key) const { return lookup(key) != nullptr; }
  /// Raw value of `key`, marking it used; nullptr when absent.
  [[nodiscard]] const KvValue* find(std::string_view key) const {
    const Entry* e = lookup(key);
    return e ? &e->value : nullptr;
  }

  // Typed access; a present key of the wrong type throws ParseError at the
  // value, a missing required key throws at the table header.
  [[nodiscard]] std::string get_string(std::string_view key) const;
  [[nodiscard]] std::string get_string(std::string_view key, std::string_view fallback) const;
  [[nodiscard]] double get_number(std::string_view key) const;
  [[nodiscard]] double get_number(std::string_view key, double fallback) const;
  [[nodiscard]] bool get_bool(std::string_view key, bool fallback) const;
  [[nodiscard]] std::vector<std::string> get_strings(std::string_view key) const;
  [[nodiscard]] std::vector<double> get_numbers(std::string_view key) const;

  /// Throws ParseError at the value of `key`.
  [[noreturn]] void fail_at(std::string_view key, const std::string& message) const;
  [[noreturn]] void fail(const std::string& message) const;

  /// Throws ParseError at the first key never read through a getter.
  void reject_unused() const;

  void add(Entry entry);

 private:
  [[nodiscard]] const Entry* lookup(std::string_view key) const;
  [[nodiscard]] const KvValue& require(std::string_view key, KvValue::Type type, const char* what) const;

  std::string source_;
  std::string name_;
  std::size_t line_;
  std::vector<Entry> entries_;
};

class KvDocument {
 public:
  /// Throws ParseError on malformed text. `source` names the text in
  /// error messages.
  [[nodiscard]] static KvDocument parse(std::string_view text, std::string source = "<text>");
  [[nodiscard]] static KvDocument load(const std::filesystem::path& path);

  [[nodiscard]] const KvTable& root() const { return tables_.front(); }
  /// The [name] table, if present.
  [[nodiscard]] const KvTable* table(std::string_view name) const;
  /// All [[name]] elements in file order.
  [[nodiscard]] std::vector<const KvTable*> array(std::string_view name) const;
  [[nodiscard]] const std::vector<KvTable>& tables() const { return tables_; }
  [[nodiscard]] const std::string& source() const { return source_; }

  /// Throws ParseError at the first table that is neither a known single
  /// table nor a known array.
  void reject_unknown_tables(const std::vector<std::string_view>& singles,
                             const std::vector<std::string_view>& arrays) const;

 private:
  std::string source_;
  std::vector<KvTable> tables_;
  std::vector<bool> is_array_;
};

}  // namespace flexport
