#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hull_lab/errors.hpp"

namespace hull_lab::cli {

struct ConfigParseError : Error {
  int line = 0, column = 0;
  ConfigParseError(const std::string& msg, int l, int c) : Error(msg), line(l), column(c) {}
};

// Declarative experiment description: "key = value" entries grouped under
// "[table]" headers. Values are numbers, quoted strings, booleans, or flat
// arrays of numbers/strings.
struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>> data;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
};

class Config {
 public:
  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  // Dotted lookup "table.key"; keys in the preamble live under "".
  const ConfigValue* find(const std::string& dotted) const;
  bool has(const std::string& dotted) const;

  double number(const std::string& dotted) const;
  double number_or(const std::string& dotted, double fallback) const;
  std::string str(const std::string& dotted) const;
  std::string str_or(const std::string& dotted, const std::string& fallback) const;
  bool boolean_or(const std::string& dotted, bool fallback) const;
  std::vector<double> numbers(const std::string& dotted) const;

  // Positive-number validation for tolerance-style fields.
  double positive(const std::string& dotted) const;

  std::string serialize() const;
  const std::map<std::string, std::map<std::string, ConfigValue>>& tables() const {
    return tables_;
  }

 private:
  std::map<std::string, std::map<std::string, ConfigValue>> tables_;
};

}  // namespace hull_lab::cli
