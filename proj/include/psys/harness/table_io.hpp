#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "psys/relief/instance.hpp"

namespace psys::harness {

struct RunManifest {
  std::string command;
  std::string instance_path;
  std::string variant;
  std::optional<unsigned> p;
  double tol = 0;
  std::uint64_t max_iter = 0;
  std::uint64_t seed = 0;
  std::string timestamp = "none";

  /// Ordered key/value view used by both writers.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  relief::Matrix values;
  std::vector<std::pair<std::string, std::string>> meta;  // "# key=value" lines
};

/// `# key=value` lines, then "k,l,value" with 1-based indices. `decimals`
/// fixes the number of printed decimals; otherwise values print in shortest
/// round-trip form.
void write_csv(std::ostream& out, const relief::Matrix& values,
               const std::vector<std::pair<std::string, std::string>>& meta,
               std::optional<unsigned> decimals = std::nullopt);

/// Reads the format above. Comment lines that are not `key=value` are
/// skipped; every (k,l) in the bounding box must appear exactly once.
CsvTable read_csv(std::istream& in, const std::string& origin = "<stream>");
CsvTable load_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal.
std::string format_double(double x);

}  // namespace psys::harness
