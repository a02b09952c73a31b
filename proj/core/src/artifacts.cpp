#include "metasched/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metasched/error.hpp"

namespace metasched {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ParseError, "expected a non-empty matrix");
  const std::size_t n_rows = rows.size();
  const std::size_t n_cols = rows[0].size();
  std::vector<double> entries;
  entries.reserve(n_rows * n_cols);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != n_cols) throw Error(ErrorCode::ParseError, "ragged matrix");
    for (const auto& v : row) entries.push_back(v.get<double>());
  }
  return Matrix(n_rows, n_cols, std::move(entries));
}

json parse_kind(const std::string& text, std::string_view kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || doc.value("kind", "") != kind) {
    throw Error(ErrorCode::ParseError, "expected an artifact of kind " + std::string(kind));
  }
  return doc;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

json model_json(const ModelParams& model) {
  const auto& s = model.shape();
  const auto values = model.values();
  return json{{"input_dim", s.input_dim},
              {"hidden", s.hidden},
              {"classes", s.classes},
              {"values", std::vector<double>(values.begin(), values.end())}};
}

ModelParams model_from(const json& j) {
  ModelShape shape{j.at("input_dim").get<std::size_t>(), j.at("hidden").get<std::size_t>(),
                   j.at("classes").get<std::size_t>()};
  return ModelParams(shape, j.at("values").get<std::vector<double>>());
}

}  // namespace

std::string reward_table_to_json(const RewardTable& table) {
  return json{{"kind", "reward_table"}, {"values", matrix_json(table.values)}}.dump(2);
}

RewardTable reward_table_from_json(const std::string& text) {
  const json doc = parse_kind(text, "reward_table");
  return guarded([&] { return RewardTable{matrix_from(doc.at("values"))}; });
}

std::string gittins_to_json(const GittinsTable& table) {
  json orderings = json::array();
  for (const auto& o : table.orderings) orderings.push_back(o);
  return json{{"kind", "gittins"},
              {"beta", table.beta},
              {"indices", matrix_json(table.indices)},
              {"orderings", orderings}}
      .dump(2);
}

GittinsTable gittins_from_json(const std::string& text) {
  const json doc = parse_kind(text, "gittins");
  return guarded([&] {
    GittinsTable table;
    table.beta = doc.at("beta").get<double>();
    table.indices = matrix_from(doc.at("indices"));
    table.orderings = doc.at("orderings").get<std::vector<std::vector<ClassId>>>();
    if (table.orderings.size() != table.indices.rows()) {
      throw Error(ErrorCode::ParseError, "one ordering per task expected");
    }
    return table;
  });
}

std::string mdp_values_to_json(const MdpPolicy& policy) {
  return json{{"kind", "mdp_values"},
              {"gamma", policy.gamma},
              {"state_dims", policy.state_dims},
              {"values", policy.values}}
      .dump(2);
}

MdpValues mdp_values_from_json(const std::string& text) {
  const json doc = parse_kind(text, "mdp_values");
  return guarded([&] {
    MdpValues out{doc.at("gamma").get<double>(), doc.at("state_dims").get<std::vector<std::size_t>>(),
                  doc.at("values").get<Vector>()};
    std::size_t states = 1;
    for (auto d : out.state_dims) states *= d;
    if (states != out.values.size()) throw Error(ErrorCode::ParseError, "value count does not match state_dims");
    return out;
  });
}

std::string model_to_json(const ModelParams& model) {
  json doc = model_json(model);
  doc["kind"] = "model";
  return doc.dump(2);
}

ModelParams model_from_json(const std::string& text) {
  const json doc = parse_kind(text, "model");
  return guarded([&] { return model_from(doc); });
}

std::string hyperparams_to_json(const Hyperparams& lambda) {
  return json{{"kind", "hyperparams"},
              {"log_inner_step", lambda.log_inner_step},
              {"init_params", model_json(lambda.init_params)}}
      .dump(2);
}

Hyperparams hyperparams_from_json(const std::string& text) {
  const json doc = parse_kind(text, "hyperparams");
  return guarded([&] {
    return Hyperparams{model_from(doc.at("init_params")), doc.at("log_inner_step").get<double>()};
  });
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace metasched
