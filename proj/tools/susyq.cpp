#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <susyq/cli.hpp>

namespace {

int fail(int code, const std::string& kind, const std::string& message, const std::vector<std::string>& details,
         const std::filesystem::path& out) {
  std::cerr << "error (" << kind << "): " << message << "\n";
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (!ec) {
    try {
      susyq::io::write_file(out / "error.json", susyq::cli::error_record(code, kind, message, details).dump(2) + "\n");
    } catch (const susyq::IoError&) {
      return susyq::exit_io;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supersymmetric quantum mechanics simulator"};
  std::string scenario, config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> workers, seed;
  app.add_option("scenario", scenario, "Scenario to run")->required()->check(CLI::IsMember(susyq::scenario_names()));
  app.add_option("--config", config_path, "YAML run configuration")->required();
  app.add_option("--out", out, "Output directory (overrides SUSYQ_OUT and the config)");
  app.add_option("--workers", workers, "Worker threads for sweep cells")->check(CLI::Range(1, 1024));
  app.add_option("--seed", seed, "Seed for random test states");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return susyq::exit_config;
  }

  const char* env = std::getenv("SUSYQ_OUT");
  std::string text;
  try {
    text = susyq::io::read_file(config_path);
  } catch (const susyq::IoError& e) {
    return fail(susyq::exit_io, "io", e.what(), {}, susyq::resolve_output_dir(out, env, nullptr));
  }

  susyq::RunConfig cfg;
  try {
    cfg = susyq::parse_config(text);
    if (YAML::Load(text)["scenario"] && cfg.scenario != scenario)
      throw susyq::ConfigError("scenario: config says '" + cfg.scenario + "' but '" + scenario + "' was requested");
  } catch (const susyq::ConfigErrors& e) {
    return fail(susyq::exit_config, "config", "invalid configuration", e.issues(),
                susyq::resolve_output_dir(out, env, nullptr));
  } catch (const susyq::ConfigError& e) {
    return fail(susyq::exit_config, "config", e.what(), {}, susyq::resolve_output_dir(out, env, nullptr));
  }
  cfg.scenario = scenario;
  if (workers) cfg.workers = *workers;
  if (seed) cfg.seed = *seed;
  return susyq::execute(cfg, susyq::resolve_output_dir(out, env, &cfg), text, std::cout);
}
