#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ionbath/errors.hpp"

int main(int argc, char** argv) {
  using namespace ionbath::cli;
  CLI::App app{"Entanglement of two defects through a harmonic reservoir", "ionbath"};
  app.set_version_flag("--version", IONBATH_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", format = "csv";
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  int jobs = 1;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--set", overrides, "override, section.key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for shot noise");
  app.add_option("--jobs", jobs, "parallel scan jobs")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));

  const char* names[] = {"equilibrium", "modes", "specdensity", "evolve", "scan", "measure"};
  const char* help[] = {"equilibrium positions and pair spacings",
                        "normal-mode spectrum and localized mode profiles",
                        "spectral densities and decoupling zeros",
                        "entanglement dynamics after the quench",
                        "scan one parameter of a scenario",
                        "simulated characteristic-function tomography"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    Config config;
    if (!config_path.empty()) config.load_file(config_path);
    for (const auto& o : overrides) config.apply_override(o);

    RunContext ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out_dir = out_dir;
    ctx.format = format == "json" ? Format::json : Format::csv;
    ctx.seed = seed;
    ctx.jobs = jobs;
    ctx.config = &config;

    std::vector<std::string> files;
    int rc = 0;
    if (ctx.command == "equilibrium") files = cmd_equilibrium(ctx);
    else if (ctx.command == "modes") files = cmd_modes(ctx);
    else if (ctx.command == "specdensity") files = cmd_specdensity(ctx);
    else if (ctx.command == "evolve") files = cmd_evolve(ctx);
    else if (ctx.command == "measure") files = cmd_measure(ctx);
    else {
      const ScanOutcome s = cmd_scan(ctx);
      files = s.files;
      if (s.failures > 0) {
        std::cerr << "ionbath: " << s.failures << " scan point(s) failed, see failure manifest\n";
        rc = 2;
      }
    }
    for (const auto& f : files) std::cout << f << '\n';
    return rc;
  } catch (const ionbath::Error& e) {
    std::cerr << "ionbath: " << e.what() << '\n';
    return ionbath::is_input_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "ionbath: " << e.what() << '\n';
    return 2;
  }
}
