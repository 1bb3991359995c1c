#pragma once

#include "mtcpp/lf.hpp"
#include "mtcpp/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mtcpp {

ModelSpec modelspec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& spec);
LF lfparams_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LF& p);

nlohmann::json read_json_file(const std::filesystem::path& path);
ModelSpec read_modelspec(const std::filesystem::path& path);
LF read_lfparams(const std::filesystem::path& path);

struct LawRow {
  std::string formula;
  std::string model;
  int n = 0;
  std::string conditioning;
  double value = 0;
  double mass_deficit = 0;
};

void write_law_table(std::ostream& os, const std::vector<LawRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

}  // namespace mtcpp
