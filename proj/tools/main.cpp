#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "twophase/harness.hpp"

using namespace twophase;

namespace {

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string tok; std::getline(in, tok, ',');) {
    std::size_t used = 0;
    const double t = std::stod(tok, &used);
    if (used != tok.size()) throw ConfigError("bad snapshot time '" + tok + "'");
    out.push_back(t);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase cross-diffusion simulator with a moving interface"};
  app.require_subcommand(1);

  std::string target, out_dir, snapshot_times;
  bool strict = false, full = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", target, "config file or preset name (" +
                                          [] {
                                            std::string s;
                                            for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
                                            return s;
                                          }() + ")")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "run a pde or ode scenario");
  add_common(run);
  run->add_flag("--strict-invariants", strict, "abort on the first invariant breach");
  run->add_option("--snapshot-times", snapshot_times, "comma-separated snapshot times");

  CLI::App* stationary = app.add_subcommand("stationary", "classify the stationary state of a scenario");
  add_common(stationary);

  CLI::App* converge = app.add_subcommand("converge", "grid convergence study");
  add_common(converge);
  converge->add_flag("--full", full, "levels 2^3..2^10 against a 2^11 reference");

  CLI11_PARSE(app, argc, argv);

  Scenario s;
  try {
    s = load_scenario(target);
    if (!out_dir.empty()) s.output_dir = out_dir;
    if (!snapshot_times.empty()) s.snapshot_times = parse_times(snapshot_times);
    if (stationary->parsed()) s.mode = Mode::stationary;
    if (converge->parsed()) {
      s.mode = Mode::converge;
      if (full) {
        s.levels = {8, 16, 32, 64, 128, 256, 512, 1024};
        s.reference_cells = 2048;
      }
    }
    if (run->parsed() && (s.mode == Mode::stationary || s.mode == Mode::converge)) s.mode = Mode::pde;
    s.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  RunOptions options;
  options.strict = strict;
  options.log = &std::cerr;
  try {
    return run_scenario(s, options, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
