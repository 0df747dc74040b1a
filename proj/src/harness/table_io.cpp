#include "psys/harness/table_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace psys::harness {

std::vector<std::pair<std::string, std::string>> RunManifest::entries() const {
  std::vector<std::pair<std::string, std::string>> e{
      {"command", command}, {"instance", instance_path.empty() ? "none" : instance_path},
      {"variant", variant.empty() ? "none" : variant}};
  e.emplace_back("p", p ? std::to_string(*p) : "none");
  e.emplace_back("tol", format_double(tol));
  e.emplace_back("max_iter", std::to_string(max_iter));
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("timestamp", timestamp);
  return e;
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void write_csv(std::ostream& out, const relief::Matrix& values,
               const std::vector<std::pair<std::string, std::string>>& meta, std::optional<unsigned> decimals) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  out << "k,l,value\n";
  for (std::size_t k = 0; k < values.rows; ++k) {
    for (std::size_t l = 0; l < values.cols; ++l) {
      out << k + 1 << ',' << l + 1 << ',';
      if (decimals) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.*f", static_cast<int>(*decimals), values(k, l));
        out << buf;
      } else {
        out << format_double(values(k, l));
      }
      out << '\n';
    }
  }
}

namespace {

std::size_t parse_index(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw TableError(where + ": index '" + s + "' is not a positive integer");
  }
  return v;
}

double parse_value(const std::string& s, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw TableError(where + ": value '" + s + "' is not a number");
  return v;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::size_t rows = 0, cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      auto eq = body.find('=');
      if (eq != std::string::npos && eq > 0 && body.substr(0, eq).find(' ') == std::string::npos) {
        table.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      }
      continue;
    }
    if (!header) {
      if (line != "k,l,value") throw TableError(where + ": expected header 'k,l,value'");
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 3) throw TableError(where + ": expected 3 fields");
    const std::size_t k = parse_index(fields[0], where);
    const std::size_t l = parse_index(fields[1], where);
    if (!cells.emplace(std::make_pair(k, l), parse_value(fields[2], where)).second) {
      throw TableError(where + ": duplicate cell (" + fields[0] + "," + fields[1] + ")");
    }
    rows = std::max(rows, k);
    cols = std::max(cols, l);
  }
  if (!header) throw TableError(origin + ": missing header 'k,l,value'");
  if (cells.size() != rows * cols) {
    throw TableError(origin + ": table has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  table.values = relief::Matrix(rows, cols);
  for (const auto& [kl, v] : cells) table.values(kl.first - 1, kl.second - 1) = v;
  return table;
}

CsvTable load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TableError("cannot open '" + path.string() + "'");
  return read_csv(in, path.string());
}

}  // namespace psys::harness
