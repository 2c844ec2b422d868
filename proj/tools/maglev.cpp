#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maglev/commands.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("-c,--config", opts.config_path, "configuration file (key = value lines)");
  sub->add_option("-s,--set", opts.overrides, "override a configuration key (key=value), repeatable");
  sub->add_option("-o,--out", opts.out_dir, "output directory for CSV files");
  sub->add_option("-j,--jobs", opts.jobs, "worker threads for sweeps");
  sub->add_option("--seed", opts.seed, "guideway and noise seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
}

maglev::RunConfig load(const CommonOpts& opts) {
  maglev::KeyValueConfig kv;
  if (!opts.config_path.empty()) kv = maglev::KeyValueConfig::from_file(opts.config_path);
  for (const auto& o : opts.overrides) kv.set_from_arg(o);
  if (!opts.out_dir.empty()) kv.set("output.dir", opts.out_dir);
  if (opts.jobs > 0) kv.set("run.jobs", std::to_string(opts.jobs));
  if (opts.seed_set) {
    kv.set("guideway.seed", std::to_string(opts.seed));
    kv.set("noise.seed", std::to_string(opts.seed));
  }
  return maglev::build_run_config(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maglev levitation control: embedded-MPC solvers and scenario studies"};
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const maglev::RunConfig&);
  };
  const Cmd cmds[] = {
      {"simulate", "closed-loop run of one scenario", maglev::cmd_simulate},
      {"roa", "region-of-attraction grid sweep per controller", maglev::cmd_roa},
      {"horizon-sweep", "open-loop solutions over prediction horizons", maglev::cmd_horizon_sweep},
      {"tune-sweep", "closed-loop weight grid (Q_s x Q_zdd)", maglev::cmd_tune_sweep},
      {"robustness", "velocity sweep under the realistic guideway", maglev::cmd_robustness},
      {"suboptimality", "fast solvers vs a converged reference", maglev::cmd_suboptimality},
  };

  CommonOpts opts;
  for (const Cmd& c : cmds) add_common(app.add_subcommand(c.name, c.help), opts);

  CLI11_PARSE(app, argc, argv);

  try {
    const maglev::RunConfig cfg = load(opts);
    for (const Cmd& c : cmds)
      if (app.got_subcommand(c.name)) return c.fn(cfg);
  } catch (const maglev::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return maglev::exit_config_error;
  } catch (const maglev::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return maglev::exit_config_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return maglev::exit_solver_failure;
  }
  return maglev::exit_config_error;
}
