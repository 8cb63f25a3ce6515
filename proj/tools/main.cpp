#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "svcmimo/cli.hpp"
#include "svcmimo/version.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::vector<std::string> sets;
  std::string seed;
  std::string out;
  std::string threads;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config, "flat key = value config file");
  sub->add_option("--set", opts.sets, "override a config key, e.g. --set n_trials=50")
      ->take_all();
  sub->add_option("--seed", opts.seed, "RNG seed (overrides the config file)");
  sub->add_option("--out", opts.out, "output directory");
  sub->add_option("--threads", opts.threads, "worker thread cap (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-level simulator and power-allocation optimizer for layered video "
               "over a massive-MIMO downlink"};
  app.set_version_flag("--version", svcmimo::kVersion);
  app.require_subcommand(1);

  const std::pair<const char*, svcmimo::cli::Command> commands[] = {
      {"simulate", svcmimo::cli::Command::Simulate},
      {"sweep", svcmimo::cli::Command::Sweep},
      {"calibrate", svcmimo::cli::Command::Calibrate},
      {"fit", svcmimo::cli::Command::Fit},
      {"predict", svcmimo::cli::Command::Predict},
      {"metrics", svcmimo::cli::Command::Metrics},
  };
  const char* descriptions[] = {
      "one Monte-Carlo transmission: losses, optional concealment and metrics",
      "power-allocation sweep over the base-layer power grid",
      "pick channel parameters hitting a target packet error rate",
      "least-squares fit of the content-aware quality model",
      "evaluate a saved quality model at one point",
      "full-reference SSIM/PSNR plus SI/TI for a pair of YUV files",
  };

  CommonOpts opts[6];
  CLI::App* subs[6];
  for (int i = 0; i < 6; ++i) {
    subs[i] = app.add_subcommand(commands[i].first, descriptions[i]);
    add_common(subs[i], opts[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (int i = 0; i < 6; ++i) {
    if (!subs[i]->parsed()) continue;
    const CommonOpts& o = opts[i];
    std::vector<std::string> overrides = o.sets;
    if (!o.seed.empty()) overrides.push_back("seed=" + o.seed);
    if (!o.out.empty()) overrides.push_back("out=" + o.out);
    if (!o.threads.empty()) overrides.push_back("threads=" + o.threads);
    try {
      const svcmimo::cli::RunConfig rc =
          svcmimo::cli::parse_config(commands[i].second, o.config, overrides);
      return svcmimo::cli::run(rc);
    } catch (const svcmimo::cli::ConfigError& e) {
      std::fprintf(stderr, "error: config: %s\n", e.what());
      return 2;
    }
  }
  return 2;
}
