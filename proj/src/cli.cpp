// SPDX-License-Identifier: Apache-2.0
#include "leam/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "leam/design.hpp"
#include "leam/pipeline.hpp"

namespace leam::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::config_error:
    case Errc::io_error:
      return 2;
    default:
      return 1;
  }
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

struct CommonOptions {
  std::string assets_dir = "assets";
  std::string catalog_path;
  std::string config_path;
};

void load_model_config(const CommonOptions& common, ModelConfig& models,
                       std::string& api_base) {
  if (common.config_path.empty()) return;
  nlohmann::json cfg = nlohmann::json::parse(read_file(common.config_path));
  if (cfg.contains("reasoning_model")) models.reasoning_model = cfg["reasoning_model"];
  if (cfg.contains("base_model")) models.base_model = cfg["base_model"];
  if (cfg.contains("api_base")) api_base = cfg["api_base"];
}

MaterialCatalog load_catalog(const CommonOptions& common) {
  fs::path path = common.catalog_path.empty()
                      ? fs::path(common.assets_dir) / "materials.catalog"
                      : fs::path(common.catalog_path);
  return MaterialCatalog::from_file(path);
}

VerifySpec load_workspace_verify(const fs::path& workspace) {
  fs::path path = workspace / kVerifyFile;
  if (!fs::exists(path)) return {};
  return parse_verify_spec(read_file(path));
}

int write_reports(const PipelineState& state, const VerifySpec& spec, std::uint64_t samples,
                  std::uint64_t seed, std::ostream& out) {
  GeomReport report = build_geom_report(state.dims, spec, samples, seed);
  write_file(state.workspace / "geom_report.txt", render_geom_report_text(report));
  write_file(state.workspace / "geom_report.rec", render_geom_report_record(report));
  out << render_geom_report_text(report);
  return report.all_checks_pass() ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"language-described antenna models to simulator macro scripts"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--assets", common.assets_dir, "prompt asset directory")
      ->capture_default_str();
  app.add_option("--catalog", common.catalog_path, "material catalog file");
  app.add_option("--config", common.config_path, "JSON config with model ids");

  // model
  auto* model_cmd = app.add_subcommand("model", "run the modeling pipeline");
  std::string desc_file, mode_str = "strong", backend_str = "replay", fixtures_dir;
  std::string workspace_str = "workspace";
  std::vector<std::string> image_files;
  bool replay_loose = false;
  model_cmd->add_option("--desc", desc_file, "description text file")->required();
  model_cmd->add_option("--image", image_files, "image file (repeatable)");
  model_cmd->add_option("--mode", mode_str, "strong|weak")->check(CLI::IsMember({"strong", "weak"}));
  model_cmd->add_option("--backend", backend_str, "replay|live")
      ->check(CLI::IsMember({"replay", "live"}));
  model_cmd->add_option("--fixtures", fixtures_dir, "fixture directory for replay");
  model_cmd->add_flag("--replay-loose", replay_loose, "replay by tool order, ignoring hashes");
  model_cmd->add_option("--workspace", workspace_str, "output workspace")->capture_default_str();

  // update
  auto* update_cmd = app.add_subcommand("update", "update parameters and re-verify");
  std::string update_workspace;
  std::vector<std::string> param_args;
  std::uint64_t up_samples = 1000000, up_seed = 42;
  update_cmd->add_option("--workspace", update_workspace, "completed workspace")->required();
  update_cmd->add_option("--param", param_args, "NAME=VALUE (repeatable)")->required();
  update_cmd->add_option("--samples", up_samples, "Monte-Carlo samples")->capture_default_str();
  update_cmd->add_option("--seed", up_seed, "sampling seed")->capture_default_str();

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "parse and lint macro files");
  std::vector<std::string> macro_files;
  validate_cmd->add_option("files", macro_files, "macro files in execution order")->required();

  // geom-report
  auto* geom_cmd = app.add_subcommand("geom-report", "verify geometry and write reports");
  std::string geom_workspace;
  std::uint64_t samples = 1000000, seed = 42;
  std::vector<std::string> symmetry_args, constraint_args;
  geom_cmd->add_option("--workspace", geom_workspace, "completed workspace")->required();
  geom_cmd->add_option("--samples", samples, "Monte-Carlo samples")->capture_default_str();
  geom_cmd->add_option("--seed", seed, "sampling seed")->capture_default_str();
  geom_cmd->add_option("--symmetry", symmetry_args, "mirror plane, e.g. x=15 (repeatable)");
  geom_cmd->add_option("--constraint", constraint_args, "NAME = EXPR (repeatable)");

  // design-patch
  auto* design_cmd = app.add_subcommand("design-patch", "transmission-line patch sizing");
  design_cmd->set_help_flag("--help", "print help");  // frees -h for the height flag
  double f0_ghz = 0.0, er = 0.0, h_mm = 0.0;
  design_cmd->add_option("--f0", f0_ghz, "resonant frequency in GHz")->required();
  design_cmd->add_option("--er", er, "substrate relative permittivity")->required();
  design_cmd->add_option("--h", h_mm, "substrate height in mm")->required();

  std::vector<std::string> argv_vec = args;
  std::vector<const char*> argv;
  argv.push_back("leam");
  for (const std::string& a : argv_vec) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (model_cmd->parsed()) {
      if (!fs::exists(desc_file))
        throw Error(Errc::config_error, "description file '" + desc_file + "' does not exist");
      std::string user_text = read_file(desc_file);

      std::vector<ImageInput> images;
      for (const std::string& f : image_files) {
        if (!fs::exists(f))
          throw Error(Errc::config_error, "image file '" + f + "' does not exist");
        images.push_back({fs::path(f).filename().string(), read_file(f)});
      }

      PipelineConfig cfg;
      cfg.workspace = workspace_str;
      cfg.assets_dir = common.assets_dir;
      if (!common.catalog_path.empty()) cfg.catalog_path = common.catalog_path;
      std::string api_base = env_or("LEAM_API_BASE", "https://api.openai.com/v1");
      load_model_config(common, cfg.models, api_base);

      std::unique_ptr<LlmBackend> backend;
      if (backend_str == "replay") {
        if (fixtures_dir.empty())
          throw Error(Errc::config_error, "replay backend requires --fixtures");
        cfg.verify_source = fs::path(fixtures_dir) / kVerifyFile;
        backend = std::make_unique<ReplayBackend>(fixtures_dir, replay_loose);
      } else {
        HttpBackendConfig http;
        http.base_url = api_base;
        http.api_key = env_or("LEAM_API_KEY", "");
        auto live = std::make_unique<HttpBackend>(http);
        live->attach_images(images);
        backend = std::move(live);
      }

      Mode mode = mode_str == "strong" ? Mode::strong : Mode::weak;
      PipelineState state = run_pipeline(user_text, images, mode, *backend, cfg);
      out << artifact_summary(state.dims) << "\n";
      out << "workspace: " << state.workspace.string() << "\n";
      out << "manifest: " << kManifestFile << "\n";
      return 0;
    }

    if (update_cmd->parsed()) {
      PipelineState state = load_workspace(update_workspace);
      ParamEnv new_values;
      for (const std::string& arg : param_args) {
        std::size_t eq = arg.find('=');
        if (eq == std::string::npos || eq == 0)
          throw Error(Errc::config_error, "--param expects NAME=VALUE, got '" + arg + "'");
        std::string name = arg.substr(0, eq);
        double value = 0.0;
        try {
          value = eval_expr(parse_expr(arg.substr(eq + 1)), ParamEnv{});
        } catch (const Error&) {
          throw Error(Errc::config_error, "bad value in '" + arg + "'");
        }
        new_values.define(name, value);
      }
      run_update(state, new_values);
      out << "updated " << new_values.size() << (new_values.size() == 1 ? " parameter" : " parameters")
          << "\n";
      return write_reports(state, load_workspace_verify(state.workspace), up_samples, up_seed,
                           out);
    }

    if (validate_cmd->parsed()) {
      MaterialCatalog catalog = load_catalog(common);
      std::vector<MacroDoc> docs;
      std::vector<std::string> labels;
      bool parse_failed = false;
      for (const std::string& f : macro_files) {
        try {
          docs.push_back(parse_macro(read_file(f)));
          labels.push_back(f);
        } catch (const Error& e) {
          err << f << ": " << e.what() << "\n";
          parse_failed = true;
        }
      }
      auto diags = lint_macros(docs, ParamEnv{}, catalog, labels);
      for (const Diagnostic& d : diags) err << to_text(d) << "\n";
      if (parse_failed || !diags.empty()) return 1;
      out << macro_files.size() << (macro_files.size() == 1 ? " file" : " files") << " clean\n";
      return 0;
    }

    if (geom_cmd->parsed()) {
      PipelineState state = load_workspace(geom_workspace);
      if (state.dims.solids.empty())
        throw Error(Errc::config_error, "workspace has no dimensioned solid list");
      VerifySpec spec = load_workspace_verify(state.workspace);
      for (const std::string& s : symmetry_args) {
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
          throw Error(Errc::config_error, "--symmetry expects axis=offset, got '" + s + "'");
        auto axis = axis_from_name(s.substr(0, eq));
        if (!axis) throw Error(Errc::config_error, "bad symmetry axis in '" + s + "'");
        spec.symmetries.push_back({*axis, std::stod(s.substr(eq + 1))});
      }
      for (const std::string& c : constraint_args)
        spec.constraints.push_back(parse_constraint(c));
      return write_reports(state, spec, samples, seed, out);
    }

    if (design_cmd->parsed()) {
      PatchDesignInput in;
      in.f0_hz = f0_ghz * 1e9;
      in.epsilon_r = er;
      in.h_mm = h_mm;
      PatchDesignOutput result = design_patch(in);
      out << "W = " << format_number(result.width_mm) << " mm\n";
      out << "L = " << format_number(result.length_mm) << " mm\n";
      out << "epsilon_eff = " << format_number(result.epsilon_eff) << "\n";
      out << "delta_L = " << format_number(result.delta_l_mm) << " mm\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace leam::cli
