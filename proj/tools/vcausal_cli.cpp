// Command-line front end: `vcausal run <config>` or one subcommand per
// experiment with flags mirroring the config fields (see docs/config.md).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vcausal/runner.hpp"

namespace {

using nlohmann::json;
using vcausal::cli::kExitIo;
using vcausal::cli::kExitParse;

struct CommonFlags {
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> c;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_c) {
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "Random seed (overrides the config)");
  cmd->add_option("--out", f.out, "Output path (default: standard output)");
  if (with_c) cmd->add_option("--c", f.c, "Speed of light in input units, e.g. 299792458");
}

// Adds `key` to `obj` only when the flag was given on the command line.
template <class T>
void put(json& obj, const char* key, const CLI::Option* opt, const T& value) {
  if (opt->count() > 0) obj[key] = value;
}

json output_block(const CommonFlags& f) {
  json out = json::object();
  if (f.format) out["format"] = *f.format;
  if (f.out) out["path"] = *f.out;
  return out;
}

json document(const std::string& variant, json body, const CommonFlags& f) {
  json doc;
  doc["seed"] = f.seed.value_or(0);
  if (f.c) doc["c"] = *f.c;
  doc["experiment"] = {{variant, std::move(body)}};
  doc["output"] = output_block(f);
  return doc;
}

json pair_source(const std::string& kind, const CLI::Option* axis_opt, double axis_deg) {
  if (kind == "entangled") return "entangled";
  json mix = json::object();
  if (axis_opt->count() > 0) mix["axis_deg"] = axis_deg;
  return {{"mixture", mix}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superluminal-influence kinematics and EPR/GHZ correlation simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vcausal::cli::kVersion);

  // run
  CommonFlags run_flags;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config file");
  run->add_option("config", config_path, "Path to the JSON config")->required();
  add_common(run, run_flags, false);

  // scan
  CommonFlags scan_flags;
  double scan_ubar = 2, scan_x1 = 1, v_start = 0.05, v_stop = 0.95, v_step = 0.05;
  std::string scan_regime = "sr";
  auto* scan = app.add_subcommand("scan", "Scan the round trip over a grid of frame speeds");
  auto* o_su = scan->add_option("--ubar", scan_ubar, "Superluminal signal speed")->required();
  auto* o_sx = scan->add_option("--x1", scan_x1, "Target position");
  auto* o_v0 = scan->add_option("--v-start", v_start);
  auto* o_v1 = scan->add_option("--v-stop", v_stop);
  auto* o_dv = scan->add_option("--v-step", v_step);
  auto* o_sr = scan->add_option("--regime", scan_regime)->check(CLI::IsMember({"sr", "preferred"}));
  add_common(scan, scan_flags, true);

  // roundtrip
  CommonFlags rt_flags;
  double rt_x1 = 1, rt_v = 0.9, rt_ubar = 2;
  std::string rt_regime = "sr";
  auto* rt = app.add_subcommand("roundtrip", "Single round-trip paradox report");
  rt->add_option("--x1", rt_x1)->required();
  rt->add_option("--v", rt_v)->required();
  rt->add_option("--ubar", rt_ubar)->required();
  auto* o_rr = rt->add_option("--regime", rt_regime)
                   ->check(CLI::IsMember({"sr", "preferred", "both"}));
  add_common(rt, rt_flags, true);

  // malus
  CommonFlags malus_flags;
  std::string malus_source = "entangled";
  double malus_axis = 0;
  std::vector<double> alphas, betas;
  std::uint64_t malus_trials = 100000;
  auto* malus = app.add_subcommand("malus", "Conditioned and marginal transmission of photon 2");
  malus->add_option("--source", malus_source)->check(CLI::IsMember({"entangled", "mixture"}));
  auto* o_max = malus->add_option("--axis-deg", malus_axis, "Mixture axis");
  auto* o_al = malus->add_option("--alpha-deg", alphas, "Polarizer I angles");
  auto* o_be = malus->add_option("--beta-deg", betas, "Polarizer II angles");
  auto* o_mt = malus->add_option("--trials", malus_trials);
  add_common(malus, malus_flags, false);

  // chsh
  CommonFlags chsh_flags;
  std::string chsh_source = "entangled";
  double chsh_axis = 0;
  std::vector<double> settings;
  std::uint64_t chsh_trials = 1000000;
  auto* chsh = app.add_subcommand("chsh", "Monte Carlo CHSH statistic");
  chsh->add_option("--source", chsh_source)->check(CLI::IsMember({"entangled", "mixture"}));
  auto* o_cax = chsh->add_option("--axis-deg", chsh_axis, "Mixture axis");
  auto* o_set = chsh->add_option("--settings-deg", settings, "a a' b b' in degrees")->expected(4);
  auto* o_ct = chsh->add_option("--trials", chsh_trials, "Trials per correlator");
  add_common(chsh, chsh_flags, false);

  // ghz
  CommonFlags ghz_flags;
  double l = 1, t_a = 0, t_l = 0.4, ghz_ubar = 3, p = 1, threshold = 0.75;
  std::uint64_t ghz_trials = 1000, blocks = 20;
  std::string model = "finite_speed", decisions = "alternating";
  auto* ghz = app.add_subcommand("ghz", "Three-party GHZ signaling protocol");
  ghz->add_option("--l", l)->required();
  auto* o_ta = ghz->add_option("--t-a", t_a);
  ghz->add_option("--t-l", t_l)->required();
  ghz->add_option("--ubar", ghz_ubar)->required();
  auto* o_gt = ghz->add_option("--trials", ghz_trials, "Trials per block");
  auto* o_p = ghz->add_option("--p", p, "GHZ fraction of the source");
  auto* o_m = ghz->add_option("--model", model)
                  ->check(CLI::IsMember({"finite_speed", "agreement", "local_only"}));
  auto* o_b = ghz->add_option("--blocks", blocks);
  auto* o_d = ghz->add_option("--decisions", decisions)
                  ->check(CLI::IsMember({"alternating", "random"}));
  auto* o_th = ghz->add_option("--threshold", threshold);
  add_common(ghz, ghz_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  std::string text;
  std::optional<std::uint64_t> seed_override;

  if (run->parsed()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "i/o error: cannot read " << config_path << '\n';
      return kExitIo;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    seed_override = run_flags.seed;
    if (run_flags.format || run_flags.out) {
      // Flags win over the file's output block; the document is otherwise untouched.
      json doc;
      try {
        doc = json::parse(text);
      } catch (const json::parse_error&) {
        doc = nullptr;
      }
      if (doc.is_object()) {
        json& out = doc["output"];
        if (!out.is_object()) out = json::object();
        if (run_flags.format) out["format"] = *run_flags.format;
        if (run_flags.out) out["path"] = *run_flags.out;
        text = doc.dump();
      }
    }
  } else if (scan->parsed()) {
    json body;
    put(body, "ubar", o_su, scan_ubar);
    put(body, "x1", o_sx, scan_x1);
    put(body, "v_start", o_v0, v_start);
    put(body, "v_stop", o_v1, v_stop);
    put(body, "v_step", o_dv, v_step);
    put(body, "regime", o_sr, scan_regime);
    text = document("kinematics_scan", body, scan_flags).dump();
  } else if (rt->parsed()) {
    json body{{"x1", rt_x1}, {"v", rt_v}, {"ubar", rt_ubar}};
    put(body, "regime", o_rr, rt_regime);
    text = document("round_trip", body, rt_flags).dump();
  } else if (malus->parsed()) {
    json body;
    body["source"] = pair_source(malus_source, o_max, malus_axis);
    put(body, "alpha_deg", o_al, alphas);
    put(body, "beta_deg", o_be, betas);
    put(body, "trials", o_mt, malus_trials);
    text = document("malus_run", body, malus_flags).dump();
  } else if (chsh->parsed()) {
    json body;
    body["source"] = pair_source(chsh_source, o_cax, chsh_axis);
    put(body, "settings_deg", o_set, settings);
    put(body, "trials", o_ct, chsh_trials);
    text = document("chsh_run", body, chsh_flags).dump();
  } else if (ghz->parsed()) {
    json body{{"l", l}, {"t_l", t_l}, {"ubar", ghz_ubar}};
    put(body, "t_a", o_ta, t_a);
    put(body, "trials", o_gt, ghz_trials);
    put(body, "p", o_p, p);
    put(body, "model", o_m, model);
    put(body, "blocks", o_b, blocks);
    put(body, "decisions", o_d, decisions);
    put(body, "threshold", o_th, threshold);
    text = document("ghz_signaling", body, ghz_flags).dump();
  }

  return vcausal::cli::run_config_text(text, std::cout, std::cerr, seed_override);
}
