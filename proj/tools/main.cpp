#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "json.hpp"
#include "sqmlab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sqmlab: stochastic-mechanics numerical experiments"};
  app.set_version_flag("--version", sqmlab::version_string);
  app.require_subcommand(1);

  struct Options {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 1;
    int verbosity = 0;
  };

  std::string chosen;
  Options opt;
  for (const std::string& name : sqmlab::cli::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "seed override")->each([&](const std::string&) {
      opt.seed_set = true;
    });
    sub->add_option("--workers", opt.workers, "worker threads");
    sub->add_flag("-v,--verbose", opt.verbosity, "verbose progress");
    sub->callback([&app, name, &chosen] {
      (void)app;
      chosen = name;
    });
  }

  CLI11_PARSE(app, argc, argv);

  nlohmann::json user_config = nlohmann::json::object();
  if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) {
      std::cerr << "error: cannot open config " << opt.config_path << "\n";
      return sqmlab::cli::exit_error;
    }
    try {
      is >> user_config;
    } catch (const std::exception& e) {
      std::cerr << "error: bad JSON in " << opt.config_path << ": " << e.what() << "\n";
      return sqmlab::cli::exit_error;
    }
  }
  if (opt.out_dir.empty()) opt.out_dir = "out-" + chosen;

  std::optional<std::uint64_t> seed;
  if (opt.seed_set) seed = opt.seed;
  auto result = sqmlab::cli::run_experiment(chosen, user_config, opt.out_dir, seed,
                                            opt.workers, opt.verbosity);
  if (result.exit_code == sqmlab::cli::exit_error) {
    std::cerr << "error: " << result.message << "\n";
  } else {
    for (const auto& c : result.checks)
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " = " << c.value << "\n";
    std::cout << (result.pass ? "PASS" : "CHECK FAILED") << " (" << chosen << ")\n";
  }
  return result.exit_code;
}
