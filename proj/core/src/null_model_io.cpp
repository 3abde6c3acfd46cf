#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hyperu/calibrate.hpp"
#include "hyperu/errors.hpp"
#include "hyperu/io.hpp"

namespace hyperu {

std::string to_json(const NullModel& m) {
  nlohmann::ordered_json j;
  j["p0"] = m.p0;
  j["dof"] = m.dof;
  j["dim"] = m.dim;
  j["box_length"] = m.box_length;
  j["cutoff"] = m.cutoff;
  j["n"] = m.n;
  j["reps"] = m.reps;
  j["seed"] = m.seed;
  j["gamma_shape"] = m.gamma_shape;
  j["gamma_rate"] = m.gamma_rate;
  j["failures"] = m.failures;
  j["version"] = HYPERU_VERSION;
  return j.dump(2) + "\n";
}

NullModel null_model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    NullModel m;
    m.p0 = j.at("p0").get<double>();
    m.dof = j.at("dof").get<double>();
    m.dim = j.value("dim", 0);
    m.box_length = j.value("box_length", 0.0);
    m.cutoff = j.value("cutoff", 0.0);
    m.n = j.value("n", std::size_t{0});
    m.reps = j.value("reps", std::size_t{0});
    m.seed = j.value("seed", std::uint64_t{0});
    m.gamma_shape = j.value("gamma_shape", 0.0);
    m.gamma_rate = j.value("gamma_rate", 0.0);
    m.failures = j.value("failures", std::size_t{0});
    if (!(m.p0 >= 0.0 && m.p0 < 1.0)) throw FormatError("null model p0 must lie in [0, 1)");
    if (!(m.dof > 0.0)) throw FormatError("null model dof must be positive");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid null model file: ") + e.what());
  }
}

void save_null_model(const NullModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(model));
}

NullModel load_null_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open null model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return null_model_from_json(buf.str());
}

}  // namespace hyperu
