#include "ldsnoma/keyvalue.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ldsnoma {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(std::move(tok));
  return out;
}

long long parse_int_token(const std::string& key, const std::string& tok) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw std::invalid_argument("key '" + key + "': '" + tok + "' is not an integer");
  return v;
}

double parse_double_token(const std::string& key, const std::string& tok) {
  // std::from_chars<double> is available in libstdc++ 11, but strtod keeps
  // this tolerant of locale-free hex floats too.
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size())
    throw std::invalid_argument("key '" + key + "': '" + tok + "' is not a number");
  return v;
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::istream& in) {
  KeyValueDoc doc;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
    if (doc.find(key))
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    doc.entries_.push_back({key, split_tokens(stripped.substr(eq + 1))});
  }
  return doc;
}

KeyValueDoc KeyValueDoc::parse_string(const std::string& text) {
  std::istringstream iss(text);
  return parse(iss);
}

const KeyValueDoc::Entry* KeyValueDoc::find(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

KeyValueDoc::Entry* KeyValueDoc::find(const std::string& key) {
  for (auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

bool KeyValueDoc::has(const std::string& key) const { return find(key) != nullptr; }

std::vector<std::string> KeyValueDoc::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.key);
  return out;
}

const std::vector<std::string>& KeyValueDoc::tokens(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw std::invalid_argument("missing key '" + key + "'");
  return e->values;
}

std::string KeyValueDoc::get_string(const std::string& key) const {
  const auto& toks = tokens(key);
  if (toks.size() != 1)
    throw std::invalid_argument("key '" + key + "': expected a single value");
  return toks[0];
}

long long KeyValueDoc::get_int(const std::string& key) const {
  return parse_int_token(key, get_string(key));
}

double KeyValueDoc::get_double(const std::string& key) const {
  return parse_double_token(key, get_string(key));
}

std::uint64_t KeyValueDoc::get_u64(const std::string& key) const {
  const std::string tok = get_string(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw std::invalid_argument("key '" + key + "': '" + tok +
                                "' is not an unsigned integer");
  return v;
}

std::vector<long long> KeyValueDoc::get_ints(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& tok : tokens(key)) out.push_back(parse_int_token(key, tok));
  return out;
}

std::vector<double> KeyValueDoc::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : tokens(key)) out.push_back(parse_double_token(key, tok));
  return out;
}

std::vector<std::string> KeyValueDoc::get_strings(const std::string& key) const {
  return tokens(key);
}

void KeyValueDoc::set(const std::string& key, std::vector<std::string> values) {
  if (Entry* e = find(key)) {
    e->values = std::move(values);
  } else {
    entries_.push_back({key, std::move(values)});
  }
}

void KeyValueDoc::set_scalar(const std::string& key, const std::string& value) {
  set(key, {value});
}

void KeyValueDoc::write(std::ostream& out) const {
  for (const auto& e : entries_) {
    out << e.key << " =";
    for (const auto& v : e.values) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace ldsnoma
