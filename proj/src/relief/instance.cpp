#include "psys/relief/instance.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace psys::relief {

namespace {

using nlohmann::json;

std::string where(const char* field, std::size_t i) { return std::string(field) + "[" + std::to_string(i) + "]"; }

std::string where(const char* field, std::size_t k, std::size_t l) {
  return std::string(field) + "[" + std::to_string(k) + "][" + std::to_string(l) + "]";
}

void check_vector(std::vector<std::string>& out, const char* field, const Vector& v, std::size_t len,
                  bool strictly_positive) {
  if (v.size() != len) {
    out.push_back(std::string(field) + " has " + std::to_string(v.size()) + " entries, expected " +
                  std::to_string(len));
    return;
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (!std::isfinite(v[i])) {
      out.push_back(where(field, i) + " is not finite");
    } else if (strictly_positive ? !(v[i] > 0) : v[i] < 0) {
      out.push_back(where(field, i) + (strictly_positive ? " must be > 0" : " must be >= 0"));
    }
  }
}

void check_matrix(std::vector<std::string>& out, const char* field, const Matrix& g, std::size_t m, std::size_t n,
                  bool strictly_positive) {
  if (g.rows != m || g.cols != n || g.data.size() != m * n) {
    out.push_back(std::string(field) + " must be " + std::to_string(m) + "x" + std::to_string(n));
    return;
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      double v = g(k, l);
      if (!std::isfinite(v)) {
        out.push_back(where(field, k, l) + " is not finite");
      } else if (strictly_positive ? !(v > 0) : v < 0) {
        out.push_back(where(field, k, l) + (strictly_positive ? " must be > 0" : " must be >= 0"));
      }
    }
  }
}

Vector read_vector(const json& j, const char* key) {
  if (!j.contains(key)) throw InstanceError(std::string("missing key '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_array()) throw InstanceError(std::string("'") + key + "' must be an array of numbers");
  Vector out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InstanceError(std::string("'") + key + "' must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix read_matrix(const json& j, const char* key) {
  if (!j.contains(key)) throw InstanceError(std::string("missing key '") + key + "'");
  const json& rows = j.at(key);
  if (!rows.is_array()) throw InstanceError(std::string("'") + key + "' must be an array of rows");
  Matrix out;
  out.rows = rows.size();
  for (const auto& row : rows) {
    if (!row.is_array()) throw InstanceError(std::string("'") + key + "' must be an array of rows");
    if (out.cols == 0) out.cols = row.size();
    if (row.size() != out.cols) throw InstanceError(std::string("'") + key + "' has rows of different length");
    for (const auto& x : row) {
      if (!x.is_number()) throw InstanceError(std::string("'") + key + "' must contain only numbers");
      out.data.push_back(x.get<double>());
    }
  }
  return out;
}

json write_matrix(const Matrix& g) {
  json rows = json::array();
  for (std::size_t k = 0; k < g.rows; ++k) {
    json row = json::array();
    for (std::size_t l = 0; l < g.cols; ++l) row.push_back(g(k, l));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<std::string> validate(const ReliefInstance& inst) {
  std::vector<std::string> out;
  if (inst.m == 0) out.push_back("m must be >= 1");
  if (inst.n == 0) out.push_back("n must be >= 1");
  check_vector(out, "s", inst.s, inst.m, false);
  check_vector(out, "d_lo", inst.d_lo, inst.n, false);
  check_vector(out, "d_hi", inst.d_hi, inst.n, false);
  check_vector(out, "omega", inst.omega, inst.m, true);
  check_vector(out, "beta", inst.beta, inst.m, true);
  check_matrix(out, "gamma", inst.gamma, inst.m, inst.n, true);
  check_matrix(out, "cost_a", inst.cost_a, inst.m, inst.n, true);
  check_matrix(out, "cost_b", inst.cost_b, inst.m, inst.n, false);
  if (!inst.vis_k.empty()) check_vector(out, "vis_k", inst.vis_k, inst.n, true);

  if (inst.d_lo.size() == inst.n && inst.d_hi.size() == inst.n) {
    for (std::size_t l = 0; l < inst.n; ++l) {
      if (inst.d_lo[l] > inst.d_hi[l]) {
        std::ostringstream os;
        os << "d_lo[" << l << "] = " << inst.d_lo[l] << " exceeds d_hi[" << l << "] = " << inst.d_hi[l];
        out.push_back(os.str());
      }
    }
  }
  if (inst.s.size() == inst.m && inst.d_lo.size() == inst.n) {
    double supply = std::accumulate(inst.s.begin(), inst.s.end(), 0.0);
    double demand = std::accumulate(inst.d_lo.begin(), inst.d_lo.end(), 0.0);
    if (supply < demand) {
      std::ostringstream os;
      os << "infeasible: total supply sum(s) = " << supply << " is below total lower demand sum(d_lo) = " << demand;
      out.push_back(os.str());
    }
  }
  return out;
}

ReliefInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InstanceError("instance must be a JSON object");
  ReliefInstance inst;
  for (const char* key : {"m", "n"}) {
    if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
      throw InstanceError(std::string("'") + key + "' must be a non-negative integer");
    }
  }
  inst.m = j.at("m").get<std::size_t>();
  inst.n = j.at("n").get<std::size_t>();
  inst.s = read_vector(j, "s");
  inst.d_lo = read_vector(j, "d_lo");
  inst.d_hi = read_vector(j, "d_hi");
  inst.gamma = read_matrix(j, "gamma");
  inst.omega = read_vector(j, "omega");
  inst.beta = read_vector(j, "beta");
  inst.cost_a = read_matrix(j, "cost_a");
  inst.cost_b = read_matrix(j, "cost_b");
  if (j.contains("vis_k") && !j.at("vis_k").is_null()) inst.vis_k = read_vector(j, "vis_k");
  return inst;
}

std::string instance_to_json(const ReliefInstance& inst) {
  json j;
  j["m"] = inst.m;
  j["n"] = inst.n;
  j["s"] = inst.s;
  j["d_lo"] = inst.d_lo;
  j["d_hi"] = inst.d_hi;
  j["gamma"] = write_matrix(inst.gamma);
  j["omega"] = inst.omega;
  j["beta"] = inst.beta;
  j["cost_a"] = write_matrix(inst.cost_a);
  j["cost_b"] = write_matrix(inst.cost_b);
  if (!inst.vis_k.empty()) j["vis_k"] = inst.vis_k;
  return j.dump(2) + "\n";
}

ReliefInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return instance_from_json(buf.str());
  } catch (const InstanceError& e) {
    throw InstanceError(path.string() + ": " + e.what());
  }
}

}  // namespace psys::relief
