#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "dcqd/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Entangled-probe Hamiltonian and relaxation estimation from Bell "
      "measurement statistics"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
  };

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"single-qubit", "Estimate a single-qubit coupling vector"},
      {"relaxation", "Estimate T1 and T2 from one entangled probe"},
      {"exchange-iso", "Estimate an isotropic two-qubit exchange coupling"},
      {"exchange-aniso", "Estimate an axially symmetric exchange coupling"},
      {"scaling", "Shot-noise and schedule-length scaling study"},
      {"validate", "Check a config without running anything"},
  };

  std::vector<std::shared_ptr<Args>> args;
  for (const auto& [name, help] : subcommands) {
    auto a = std::make_shared<Args>();
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", a->config, "Path to the experiment config")
        ->required();
    sub->add_option("--seed", [a](const CLI::results_t& res) {
         std::uint64_t v = 0;
         if (!CLI::detail::lexical_cast(res[0], v)) return false;
         a->seed = v;
         return true;
       },
       "Override the config seed")
        ->expected(1);
    sub->add_option("--out", a->out, "Output directory (default: .)");
    args.push_back(a);
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < subcommands.size(); ++i) {
    if (app.got_subcommand(subcommands[i].first)) {
      const Args& a = *args[i];
      return dcqd::run_subcommand(subcommands[i].first, a.config, a.seed,
                                  a.out, std::cout, std::cerr);
    }
  }
  std::cerr << "error [CONFIG] no subcommand given\n";
  return 2;
}
