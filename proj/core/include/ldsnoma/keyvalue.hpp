#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ldsnoma {

/// Flat text document of `key = value [value ...]` lines.
///
/// Used for scenario files and experiment configs. Lines starting with '#'
/// and blank lines are ignored; keys must be unique. Values are whitespace
/// separated tokens; typed getters convert on access and throw
/// std::invalid_argument with the offending key on failure.
class KeyValueDoc {
 public:
  static KeyValueDoc parse(std::istream& in);
  static KeyValueDoc parse_string(const std::string& text);

  bool has(const std::string& key) const;
  /// Keys in first-seen order.
  std::vector<std::string> keys() const;

  const std::vector<std::string>& tokens(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  long long get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<long long> get_ints(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  void set(const std::string& key, std::vector<std::string> values);
  void set_scalar(const std::string& key, const std::string& value);

  void write(std::ostream& out) const;

 private:
  struct Entry {
    std::string key;
    std::vector<std::string> values;
  };
  const Entry* find(const std::string& key) const;
  Entry* find(const std::string& key);

  std::vector<Entry> entries_;
};

}  // namespace ldsnoma
