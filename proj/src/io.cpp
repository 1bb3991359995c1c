#include "mtcpp/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace mtcpp {

std::string to_string(const TypeList& types, char sep) {
  std::string out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(types[i].value);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T get(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

ModelSpec modelspec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("model spec: expected an object");
  const int k = get<int>(j, "k", "model spec");
  std::vector<std::string> names;
  if (j.contains("types")) names = get<std::vector<std::string>>(j, "types", "model spec");
  if (!j.contains("pmf") || !j["pmf"].is_object()) {
    throw SchemaError("model spec: 'pmf' must be an object keyed by parent type");
  }
  std::vector<std::vector<PmfRow>> pmf(k > 0 ? k : 0);
  for (const auto& [key, rows] : j["pmf"].items()) {
    int parent = 0;
    auto res = std::from_chars(key.data(), key.data() + key.size(), parent);
    if (res.ec != std::errc{} || res.ptr != key.data() + key.size() || parent < 1 ||
        parent > k) {
      throw SchemaError("model spec: parent type '" + key + "' is not in 1..k");
    }
    if (!rows.is_array()) throw SchemaError("model spec: parent type " + key + " needs a list");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string where = "model spec: parent type " + key + ", row " + std::to_string(r);
      PmfRow row;
      row.counts = get<std::vector<int>>(rows[r], "counts", where);
      row.p = get<double>(rows[r], "p", where);
      pmf[parent - 1].push_back(std::move(row));
    }
  }
  const bool allow_singular = j.value("allow_singular", false);
  return ModelSpec(k, std::move(pmf), std::move(names), allow_singular);
}

nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json pmf = nlohmann::json::object();
  for (int l = 0; l < spec.k(); ++l) {
    nlohmann::json rows = nlohmann::json::array();
    for (const PmfRow& r : spec.pmf()[l]) rows.push_back({{"counts", r.counts}, {"p", r.p}});
    pmf[std::to_string(l + 1)] = std::move(rows);
  }
  return {{"k", spec.k()}, {"types", spec.names()}, {"pmf", std::move(pmf)}};
}

LF lfparams_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("lf params: expected an object");
  const int k = get<int>(j, "k", "lf params");
  const auto H = get<std::vector<std::vector<double>>>(j, "H", "lf params");
  const auto g = get<std::vector<double>>(j, "g", "lf params");
  const double m = get<double>(j, "m", "lf params");
  if (k < 1 || static_cast<int>(H.size()) != k || static_cast<int>(g.size()) != k) {
    throw SchemaError("lf params: H must be k x k and g of length k");
  }
  LF p{Eigen::MatrixXd(k, k), Eigen::VectorXd(k), m};
  for (int r = 0; r < k; ++r) {
    if (static_cast<int>(H[r].size()) != k) {
      throw SchemaError("lf params: row " + std::to_string(r + 1) + " of H has wrong length");
    }
    for (int c = 0; c < k; ++c) p.H(r, c) = H[r][c];
    p.g[r] = g[r];
  }
  validate(p);
  return p;
}

nlohmann::json to_json(const LF& p) {
  std::vector<std::vector<double>> H(p.k(), std::vector<double>(p.k()));
  for (int r = 0; r < p.k(); ++r) {
    for (int c = 0; c < p.k(); ++c) H[r][c] = p.H(r, c);
  }
  return {{"k", p.k()}, {"H", H}, {"g", std::vector<double>(p.g.data(), p.g.data() + p.k())},
          {"m", p.m}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

ModelSpec read_modelspec(const std::filesystem::path& path) {
  return modelspec_from_json(read_json_file(path));
}

LF read_lfparams(const std::filesystem::path& path) {
  return lfparams_from_json(read_json_file(path));
}

void write_law_table(std::ostream& os, const std::vector<LawRow>& rows) {
  os << "formula,model,n,conditioning,value,mass_deficit\n";
  for (const auto& r : rows) {
    os << r.formula << ',' << r.model << ',' << r.n << ',' << r.conditioning << ','
       << format_double(r.value) << ',' << format_double(r.mass_deficit) << '\n';
  }
}

}  // namespace mtcpp
