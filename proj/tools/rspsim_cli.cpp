// Copyright 2026 The rspsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Command-line driver: config-driven preparation runs, preparable-region
/// bounds with Monte Carlo clouds, standalone tomographic reconstruction and
/// Procrustean distillation. Exit codes: 0 success, 2 input error,
/// 3 numerical non-convergence.

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rspsim/bounds.hpp"
#include "rspsim/experiment.hpp"
#include "rspsim/json_io.hpp"
#include "rspsim/qstate.hpp"
#include "rspsim/rsp.hpp"
#include "rspsim/tomo.hpp"

namespace {

using nlohmann::json;
using rspsim::io::SchemaError;

constexpr const char* kVersion = "rspsim 0.1.0";
constexpr double kDegToRad = std::numbers::pi / 180.0;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", v);
  return buf;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Strict object check: every key must be known, every required key present.
void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional = {}) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const auto& k : required) known = known || k == key;
    for (const auto& k : optional) known = known || k == key;
    if (!known) throw SchemaError(where + ": unknown key \"" + key + "\"");
  }
  for (const auto& k : required) {
    if (!obj.contains(k)) {
      throw SchemaError(where + ": missing key \"" + k + "\"");
    }
  }
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key) {
  if (!obj[key].is_number()) {
    throw SchemaError(where + "." + key + ": expected a number");
  }
  return obj[key].get<double>();
}

std::uint64_t required_seed(const json& cfg, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (!cfg.contains("seed") || !cfg["seed"].is_number_unsigned()) {
    throw SchemaError("config: \"seed\" is mandatory (non-negative integer)");
  }
  return cfg["seed"].get<std::uint64_t>();
}

/// One plate's retardance from either a wavelength pair or a measured value.
double plate_retardance(const json& plate, const std::string& where) {
  if (plate.contains("measured_retardance_deg")) {
    check_keys(plate, where, {"measured_retardance_deg"});
    return get_number(plate, where, "measured_retardance_deg") * kDegToRad;
  }
  check_keys(plate, where,
             {"design_retardance_deg", "design_wavelength_nm",
              "operating_wavelength_nm"});
  return rspsim::optics::retardance_at(
      get_number(plate, where, "design_retardance_deg") * kDegToRad,
      get_number(plate, where, "design_wavelength_nm"),
      get_number(plate, where, "operating_wavelength_nm"));
}

rspsim::rsp::PlateRetardances parse_plates(const json& cfg) {
  rspsim::rsp::PlateRetardances rets;
  if (!cfg.contains("plates")) return rets;
  check_keys(cfg["plates"], "config.plates", {"qwp", "hwp"});
  rets.qwp = plate_retardance(cfg["plates"]["qwp"], "config.plates.qwp");
  rets.hwp = plate_retardance(cfg["plates"]["hwp"], "config.plates.hwp");
  return rets;
}

rspsim::rsp::ResourceSpec parse_resource(const json& cfg) {
  rspsim::rsp::ResourceSpec spec;
  if (!cfg.contains("resource")) return spec;
  check_keys(cfg["resource"], "config.resource", {},
             {"epsilon_deg", "rel_phase_deg", "white_noise"});
  const json& r = cfg["resource"];
  if (r.contains("epsilon_deg")) {
    spec.epsilon = get_number(r, "config.resource", "epsilon_deg") * kDegToRad;
  }
  if (r.contains("rel_phase_deg")) {
    spec.rel_phase =
        get_number(r, "config.resource", "rel_phase_deg") * kDegToRad;
  }
  if (r.contains("white_noise")) {
    spec.white_noise = get_number(r, "config.resource", "white_noise");
  }
  return spec;
}

std::vector<rspsim::rsp::TargetState> parse_targets(const json& cfg) {
  if (!cfg.contains("targets")) {
    throw SchemaError("config: missing key \"targets\"");
  }
  const json& t = cfg["targets"];
  if (t.is_string() && t.get<std::string>() == "axis_sweep") {
    return rspsim::tomo::axis_sweep_targets();
  }
  if (!t.is_array() || t.empty()) {
    throw SchemaError(
        "config.targets: expected \"axis_sweep\" or a non-empty array");
  }
  std::vector<rspsim::rsp::TargetState> targets;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string where = "config.targets[" + std::to_string(i) + "]";
    check_keys(t[i], where, {"theta_deg", "phi_deg", "lambda"});
    targets.push_back(rspsim::rsp::TargetState{
        get_number(t[i], where, "theta_deg") * kDegToRad,
        get_number(t[i], where, "phi_deg") * kDegToRad,
        get_number(t[i], where, "lambda")});
  }
  return targets;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
};

std::filesystem::path ensure_out(const CommonFlags& flags) {
  const std::filesystem::path out(flags.out_dir);
  std::filesystem::create_directories(out);
  return out;
}

int cmd_prepare(const CommonFlags& flags) {
  const json cfg = load_json(flags.config_path);
  check_keys(cfg, "config", {"seed", "targets"},
             {"n0", "resource", "plates"});
  const std::uint64_t seed = required_seed(cfg, flags.seed);
  const double n0 =
      cfg.contains("n0") ? get_number(cfg, "config", "n0") : 1e4;
  const auto resource_spec = parse_resource(cfg);
  const auto rets = parse_plates(cfg);
  const auto targets = parse_targets(cfg);

  const auto results = rspsim::tomo::run_experiment_series(
      resource_spec, targets, n0, seed, rets);

  const auto out = ensure_out(flags);
  std::string csv = "target_id,s1,s2,s3,purity,fidelity\n";
  json table = json::array();
  double fidelity_sum = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto b = rspsim::qstate::bloch_from_state(r.reconstruction.rho_hat);
    const double purity = rspsim::qstate::purity(r.reconstruction.rho_hat);
    csv += std::to_string(i) + "," + format_double(b.s1) + "," +
           format_double(b.s2) + "," + format_double(b.s3) + "," +
           format_double(purity) + "," + format_double(r.fidelity) + "\n";
    fidelity_sum += r.fidelity;
    table.push_back({{"target_id", i},
                     {"fidelity", r.fidelity},
                     {"purity", purity},
                     {"success_probability", r.settings.success_probability}});

    json state = {
        {"target",
         {{"theta", r.target.theta},
          {"phi", r.target.phi},
          {"lambda", r.target.lam}}},
        {"settings",
         {{"qwp_angle", r.settings.qwp_angle},
          {"hwp_angle", r.settings.hwp_angle},
          {"t_d", r.settings.t_d},
          {"t_a", r.settings.t_a},
          {"predicted_fidelity", r.settings.predicted_fidelity},
          {"success_probability", r.settings.success_probability}}},
        {"expected", rspsim::io::state_to_json(r.expected)},
        {"reconstructed", rspsim::io::state_to_json(r.reconstruction.rho_hat)},
        {"fidelity", r.fidelity}};
    char name[32];
    std::snprintf(name, sizeof(name), "target_%02zu.json", i);
    write_text(out / name, state.dump(2) + "\n");
  }

  const json manifest = {{"tool_version", kVersion},
                         {"config_hash", fnv1a(cfg.dump())},
                         {"seed", seed},
                         {"n0", n0},
                         {"mean_fidelity", fidelity_sum / results.size()},
                         {"targets", table}};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  write_text(out / "states.csv", csv);
  return 0;
}

int cmd_bounds(const CommonFlags& flags) {
  const json cfg = load_json(flags.config_path);
  check_keys(cfg, "config", {"seed"}, {"tetra", "matrix", "samples"});
  const std::uint64_t seed = required_seed(cfg, flags.seed);
  if (cfg.contains("tetra") == cfg.contains("matrix")) {
    throw SchemaError(
        "config: exactly one of \"tetra\" or \"matrix\" is required");
  }
  std::size_t samples = 100000;
  if (cfg.contains("samples")) {
    samples = static_cast<std::size_t>(get_number(cfg, "config", "samples"));
  }
  if (flags.samples) samples = *flags.samples;

  json report = {{"tool_version", kVersion},
                 {"config_hash", fnv1a(cfg.dump())},
                 {"seed", seed},
                 {"samples", samples}};
  rspsim::qstate::DensityMatrix2Q resource =
      rspsim::qstate::DensityMatrix2Q::bell_phi_plus();
  std::optional<rspsim::bounds::PreparableEllipsoid> ellipsoid;
  if (cfg.contains("tetra")) {
    check_keys(cfg["tetra"], "config.tetra", {"t1", "t2", "t3"});
    const rspsim::bounds::TetrahedronState t{
        get_number(cfg["tetra"], "config.tetra", "t1"),
        get_number(cfg["tetra"], "config.tetra", "t2"),
        get_number(cfg["tetra"], "config.tetra", "t3")};
    resource = rspsim::bounds::tetra_state(t);
    ellipsoid = rspsim::bounds::preparable_ellipsoid(t);
    report["semi_axes"] = {ellipsoid->a1, ellipsoid->a2, ellipsoid->a3};
    report["entangled"] = rspsim::bounds::is_entangled(t);
    report["purity_AB"] = rspsim::bounds::purity_AB(t);
    report["max_purity_B"] = rspsim::bounds::max_purity_B(t);
  } else {
    resource = rspsim::qstate::DensityMatrix2Q(
        rspsim::io::matrix_from_json<rspsim::qstate::Matrix4cd>(
            cfg["matrix"]));
  }

  const auto cloud =
      rspsim::bounds::monte_carlo_preparable(resource, samples, seed);
  std::string csv = "s1,s2,s3,success_prob\n";
  double max_purity = 0.0;
  for (const auto& s : cloud) {
    csv += format_double(s.s1) + "," + format_double(s.s2) + "," +
           format_double(s.s3) + "," + format_double(s.success) + "\n";
    max_purity = std::max(
        max_purity,
        0.5 * (1.0 + s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3));
  }
  report["sampled_max_purity"] = max_purity;
  if (ellipsoid) {
    const auto summary =
        rspsim::bounds::summarize_against_ellipsoid(cloud, *ellipsoid);
    report["violations"] = summary.violations;
    report["max_residual"] = summary.max_residual;
    if (summary.violations > 0) {
      throw std::runtime_error("bounds: sample cloud violates the ellipsoid");
    }
  }

  const auto out = ensure_out(flags);
  write_text(out / "bounds.json", report.dump(2) + "\n");
  write_text(out / "cloud.csv", csv);
  return 0;
}

int cmd_tomo(const CommonFlags& flags) {
  const auto counts =
      rspsim::io::count_record_from_json(load_json(flags.config_path));
  json result;
  if (counts.labels.size() == 6) {
    result = rspsim::io::tomography_result_to_json(rspsim::tomo::mle_reconstruct(
        counts, rspsim::tomo::projector_set_1q()));
  } else if (counts.labels.size() == 36) {
    result = rspsim::io::tomography_result_to_json(rspsim::tomo::mle_reconstruct(
        counts, rspsim::tomo::projector_set_2q()));
  } else {
    throw SchemaError("count record: expected 6 or 36 settings, got " +
                      std::to_string(counts.labels.size()));
  }
  write_text(ensure_out(flags) / "reconstruction.json", result.dump(2) + "\n");
  return 0;
}

int cmd_distill(const CommonFlags& flags) {
  const json cfg = load_json(flags.config_path);
  check_keys(cfg, "config", {"seed", "p"});
  const std::uint64_t seed = required_seed(cfg, flags.seed);
  const double p = get_number(cfg, "config", "p");
  const auto [filter, prob] = rspsim::bounds::distill_pure(p);
  const json report = {{"tool_version", kVersion},
                       {"config_hash", fnv1a(cfg.dump())},
                       {"seed", seed},
                       {"p", p},
                       {"filter", rspsim::io::matrix_to_json(filter.mat)},
                       {"success_probability", prob}};
  write_text(ensure_out(flags) / "distill.json", report.dump(2) + "\n");
  return 0;
}

void add_common(CLI::App* sub, CommonFlags& flags, bool samples_flag) {
  sub->add_option("--config", flags.config_path, "Input file path")
      ->required();
  sub->add_option("--out", flags.out_dir, "Output directory");
  sub->add_option("--seed", flags.seed, "Seed override");
  if (samples_flag) {
    sub->add_option("--samples", flags.samples, "Monte Carlo sample count");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remote polarization-qubit preparation simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags prepare_flags, bounds_flags, tomo_flags, distill_flags;
  CLI::App* prepare =
      app.add_subcommand("prepare", "Run the preparation loop over targets");
  add_common(prepare, prepare_flags, false);
  CLI::App* bounds =
      app.add_subcommand("bounds", "Preparable-region bounds and sample cloud");
  add_common(bounds, bounds_flags, true);
  CLI::App* tomo =
      app.add_subcommand("tomo", "Reconstruct a state from a count record");
  add_common(tomo, tomo_flags, false);
  CLI::App* distill =
      app.add_subcommand("distill", "Procrustean distillation filter");
  add_common(distill, distill_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (prepare->parsed()) return cmd_prepare(prepare_flags);
    if (bounds->parsed()) return cmd_bounds(bounds_flags);
    if (tomo->parsed()) return cmd_tomo(tomo_flags);
    return cmd_distill(distill_flags);
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
