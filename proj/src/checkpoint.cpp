#include "smp/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smp/error.hpp"

namespace smp {

using nlohmann::json;

std::string checkpoint_to_json(const ModelSpec& spec, const ModelParams& params) {
  json j;
  j["format"] = "smp-checkpoint-v1";
  j["spec"] = {
      {"variant", variant_name(spec.variant)}, {"k_steps", spec.k_steps},
      {"stoch_dim", spec.stoch_dim},           {"feat_dim", spec.feat_dim},
      {"hidden_dim", spec.hidden_dim},         {"out_dim", spec.out_dim},
  };
  json ps = json::array();
  for (const auto& p : params.entries())
    ps.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}, {"data", p.value.data()}});
  j["params"] = std::move(ps);
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "smp-checkpoint-v1") throw DataError("checkpoint: unknown format");
    const json& s = j.at("spec");
    Checkpoint c;
    const auto variant = parse_variant(s.at("variant").get<std::string>());
    if (!variant) throw DataError("checkpoint: unknown variant");
    c.spec.variant = *variant;
    c.spec.k_steps = s.at("k_steps").get<std::size_t>();
    c.spec.stoch_dim = s.at("stoch_dim").get<std::size_t>();
    c.spec.feat_dim = s.at("feat_dim").get<std::size_t>();
    c.spec.hidden_dim = s.at("hidden_dim").get<std::size_t>();
    c.spec.out_dim = s.at("out_dim").get<std::size_t>();
    std::vector<Parameter> entries;
    for (const json& p : j.at("params")) {
      const auto rows = p.at("rows").get<std::size_t>();
      const auto cols = p.at("cols").get<std::size_t>();
      auto data = p.at("data").get<std::vector<double>>();
      if (data.size() != rows * cols) throw DataError("checkpoint: matrix data length mismatch");
      entries.push_back({p.at("name").get<std::string>(), DenseMatrix(rows, cols, std::move(data))});
    }
    c.params = ModelParams(std::move(entries));
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const ModelParams& params) {
  std::ofstream out(path);
  if (!out) throw DataError("checkpoint: cannot open " + path.string() + " for writing");
  out << checkpoint_to_json(spec, params);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("checkpoint: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace smp
