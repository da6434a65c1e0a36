#include "hull_lab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hull_lab::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& tok, double* out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') return false;
  *out = v;
  return true;
}

ConfigValue parse_value(const std::string& raw, int line, int col) {
  const std::string tok = trim(raw);
  if (tok.empty()) throw ConfigParseError("missing value", line, col);
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"')
      throw ConfigParseError("unterminated string", line, col);
    return ConfigValue{tok.substr(1, tok.size() - 2)};
  }
  if (tok == "true") return ConfigValue{true};
  if (tok == "false") return ConfigValue{false};
  if (tok.front() == '[') {
    if (tok.back() != ']') throw ConfigParseError("unterminated array", line, col);
    const std::string body = tok.substr(1, tok.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    for (char c : body) {
      if (c == ',') {
        items.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!trim(cur).empty()) items.push_back(trim(cur));
    if (!items.empty() && items.front().size() && items.front().front() == '"') {
      std::vector<std::string> out;
      for (const auto& it : items) {
        if (it.size() < 2 || it.front() != '"' || it.back() != '"')
          throw ConfigParseError("bad string array element", line, col);
        out.push_back(it.substr(1, it.size() - 2));
      }
      return ConfigValue{std::move(out)};
    }
    std::vector<double> out;
    for (const auto& it : items) {
      double v;
      if (!parse_number(it, &v))
        throw ConfigParseError("bad numeric array element '" + it + "'", line, col);
      out.push_back(v);
    }
    return ConfigValue{std::move(out)};
  }
  double v;
  if (parse_number(tok, &v)) return ConfigValue{v};
  throw ConfigParseError("cannot parse value '" + tok + "'", line, col);
}

}  // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string table;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigParseError("unterminated table header", line_no, 1);
      table = trim(line.substr(1, line.size() - 2));
      if (table.empty()) throw ConfigParseError("empty table name", line_no, 1);
      cfg.tables_[table];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("expected 'key = value'", line_no, 1);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigParseError("empty key", line_no, 1);
    const int col = static_cast<int>(raw.find('=')) + 2;
    cfg.tables_[table][key] = parse_value(line.substr(eq + 1), line_no, col);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

const ConfigValue* Config::find(const std::string& dotted) const {
  const std::size_t dot = dotted.find('.');
  const std::string table = dot == std::string::npos ? "" : dotted.substr(0, dot);
  const std::string key = dot == std::string::npos ? dotted : dotted.substr(dot + 1);
  const auto t = tables_.find(table);
  if (t == tables_.end()) return nullptr;
  const auto k = t->second.find(key);
  if (k == t->second.end()) return nullptr;
  return &k->second;
}

bool Config::has(const std::string& dotted) const { return find(dotted) != nullptr; }

double Config::number(const std::string& dotted) const {
  const ConfigValue* v = find(dotted);
  if (!v || !v->is_number()) throw Error("config is missing numeric field '" + dotted + "'");
  return std::get<double>(v->data);
}

double Config::number_or(const std::string& dotted, double fallback) const {
  const ConfigValue* v = find(dotted);
  if (!v) return fallback;
  if (!v->is_number()) throw Error("config field '" + dotted + "' must be numeric");
  return std::get<double>(v->data);
}

std::string Config::str(const std::string& dotted) const {
  const ConfigValue* v = find(dotted);
  if (!v || !v->is_string()) throw Error("config is missing string field '" + dotted + "'");
  return std::get<std::string>(v->data);
}

std::string Config::str_or(const std::string& dotted, const std::string& fallback) const {
  const ConfigValue* v = find(dotted);
  if (!v) return fallback;
  if (!v->is_string()) throw Error("config field '" + dotted + "' must be a string");
  return std::get<std::string>(v->data);
}

bool Config::boolean_or(const std::string& dotted, bool fallback) const {
  const ConfigValue* v = find(dotted);
  if (!v) return fallback;
  if (!std::holds_alternative<bool>(v->data))
    throw Error("config field '" + dotted + "' must be a boolean");
  return std::get<bool>(v->data);
}

std::vector<double> Config::numbers(const std::string& dotted) const {
  const ConfigValue* v = find(dotted);
  if (!v) throw Error("config is missing array field '" + dotted + "'");
  if (std::holds_alternative<std::vector<double>>(v->data))
    return std::get<std::vector<double>>(v->data);
  if (v->is_number()) return {std::get<double>(v->data)};
  throw Error("config field '" + dotted + "' must be a numeric array");
}

double Config::positive(const std::string& dotted) const {
  const double v = number(dotted);
  if (!(v > 0.0)) throw Error("config field '" + dotted + "' must be positive");
  return v;
}

namespace {

std::string value_str(const ConfigValue& v) {
  std::ostringstream os;
  os.precision(17);
  if (std::holds_alternative<double>(v.data)) {
    os << std::get<double>(v.data);
  } else if (std::holds_alternative<bool>(v.data)) {
    os << (std::get<bool>(v.data) ? "true" : "false");
  } else if (std::holds_alternative<std::string>(v.data)) {
    os << '"' << std::get<std::string>(v.data) << '"';
  } else if (std::holds_alternative<std::vector<double>>(v.data)) {
    os << '[';
    const auto& a = std::get<std::vector<double>>(v.data);
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? ", " : "") << a[i];
    os << ']';
  } else {
    os << '[';
    const auto& a = std::get<std::vector<std::string>>(v.data);
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? ", " : "") << '"' << a[i] << '"';
    os << ']';
  }
  return os.str();
}

}  // namespace

std::string Config::serialize() const {
  std::ostringstream os;
  for (const auto& [table, entries] : tables_) {
    if (!table.empty()) os << "[" << table << "]\n";
    for (const auto& [key, value] : entries) os << key << " = " << value_str(value) << "\n";
  }
  return os.str();
}

}  // namespace hull_lab::cli
