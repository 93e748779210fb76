#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include "CLI11.hpp"
#include "nacs/runner.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Non-Abelian Chern-Simons vortex solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grid;
  std::optional<double> lambda;
  std::optional<unsigned long long> seed;

  for (const char *name : {"solve", "second", "sweep", "verify"}) {
    auto *sub = app.add_subcommand(name, std::string("run mode '") + name + "'");
    sub->add_option("--config", config_path, "problem config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--grid", grid, "grid size M1xM2");
    sub->add_option("--lambda", lambda, "override params.lambda");
    sub->add_option("--seed", seed, "seed recorded in the summary");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    nacs::RunConfig cfg = nacs::load_config(config_path);
    cfg.mode = nacs::run_mode_from_string(app.get_subcommands().front()->get_name());
    if (!out_dir.empty())
      cfg.output = out_dir;
    if (!grid.empty()) {
      static const std::regex re(R"((\d+)x(\d+))");
      std::smatch m;
      if (!std::regex_match(grid, m, re)) {
        std::cerr << "error: --grid expects M1xM2, got '" << grid << "'\n";
        return nacs::kExitConfig;
      }
      cfg.M1 = std::stoi(m[1]);
      cfg.M2 = std::stoi(m[2]);
    }
    if (lambda)
      cfg.params.lambda = *lambda;
    if (seed)
      cfg.seed = *seed;
    return nacs::run(cfg, std::cerr);
  } catch (const nacs::ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return nacs::kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return nacs::kExitConfig;
  }
}
