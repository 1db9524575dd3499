// Command-line entry point: hsaw {sample|analyze|enumerate|predict|report} [flags]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hsaw/hsaw.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kCheckFailed = 3 };

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> n_bridges;
  std::optional<std::uint64_t> samples;
  std::optional<std::size_t> chains;
  std::optional<std::uint64_t> stride;
  std::optional<std::string> out;
  std::optional<std::string> fit_window;
  std::optional<double> sigma;
  std::optional<std::string> in;
  std::optional<std::size_t> max_len;
  std::optional<double> mu;
  std::optional<std::size_t> threads;
};

hsaw::ExperimentConfig build_config(const Overrides& o) {
  hsaw::ExperimentConfig c = o.config ? hsaw::load_config(*o.config) : hsaw::ExperimentConfig{};
  if (o.seed) c.chain.seed = *o.seed;
  if (o.steps) c.chain.steps = *o.steps;
  if (o.n_bridges) c.n_bridges = *o.n_bridges;
  if (o.samples) c.chain.total_samples = *o.samples;
  if (o.chains) c.chain.chains = *o.chains;
  if (o.stride) c.chain.stride = *o.stride;
  if (o.out) c.output_dir = *o.out;
  if (o.fit_window) hsaw::apply_setting(c, "fit_window", *o.fit_window);
  if (o.sigma) c.sigma = *o.sigma;
  if (o.max_len) c.enum_max_len = *o.max_len;
  if (o.mu) c.mu = *o.mu;
  if (o.threads) c.threads = *o.threads;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-plane self-avoiding walks, irreducible bridges and SLE(8/3) predictions"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "flat key = value config file");
  app.add_option("--seed", o.seed, "base RNG seed");
  app.add_option("--steps", o.steps, "walk length N");
  app.add_option("--n-bridges", o.n_bridges, "bridge index n of Y_n");
  app.add_option("--samples", o.samples, "samples per chain");
  app.add_option("--chains", o.chains, "independent chains");
  app.add_option("--stride", o.stride, "pivot attempts between samples");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--fit-window", o.fit_window, "log-log fit window LO,HI");
  app.add_option("--sigma", o.sigma, "stability exponent in the weight Y_n^(-1/sigma)");
  app.add_option("--threads", o.threads, "worker threads for sampling (0: all cores)");

  auto* sample = app.add_subcommand("sample", "run the pivot chains and write sample records");
  auto* analyze = app.add_subcommand("analyze", "histograms, log-log fits and the excursion CDF comparison");
  auto* enumerate = app.add_subcommand("enumerate", "exact SAW, bridge and irreducible bridge counts");
  auto* predict = app.add_subcommand("predict", "tabulate rho and the rightmost-excursion CDF");
  auto* report = app.add_subcommand("report", "analyse a run and check it against the acceptance limits");
  for (auto* sub : {analyze, report}) sub->add_option("--in", o.in, "directory holding samples.csv (default: --out)");
  enumerate->add_option("--max-len", o.max_len, "maximum walk length");
  enumerate->add_option("--mu", o.mu, "connective constant for Kesten partial sums");
  app.fallthrough();
  for (auto* sub : {sample, analyze, enumerate, predict, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const hsaw::ExperimentConfig cfg = build_config(o);
    const std::filesystem::path in = o.in ? std::filesystem::path(*o.in) : cfg.output_dir;
    if (sample->parsed()) {
      const auto run = hsaw::cmd_sample(cfg);
      std::cout << "records " << run.records.size() << ", discarded " << run.discarded() << " -> "
                << (cfg.output_dir / "samples.csv").string() << '\n';
      if (run.records.empty()) {
        std::cerr << "warning: every snapshot had fewer than " << cfg.n_bridges << " bridge points\n";
      }
    } else if (analyze->parsed()) {
      const auto a = hsaw::cmd_analyze(cfg, in);
      std::cout << "weighted slope " << a.fit_weighted.slope << ", control slope " << a.fit_unweighted.slope
                << ", KS " << a.cdf.ks.distance << '\n';
    } else if (enumerate->parsed()) {
      const auto r = hsaw::cmd_enumerate(cfg);
      if (cfg.enum_max_len >= 6) std::cout << "mu estimate " << r.mu_estimate.mu << '\n';
    } else if (predict->parsed()) {
      hsaw::cmd_predict(cfg);
    } else if (report->parsed()) {
      return hsaw::cmd_report(cfg, in, std::cout) == 0 ? kOk : kCheckFailed;
    }
    return kOk;
  } catch (const hsaw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
