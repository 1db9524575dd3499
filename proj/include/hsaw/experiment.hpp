#pragma once

// Experiment runs: config handling, the sample / analyze / enumerate /
// predict / report pipelines and the run manifest.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hsaw/bridges.hpp"
#include "hsaw/enumeration.hpp"
#include "hsaw/io.hpp"
#include "hsaw/pivot.hpp"
#include "hsaw/sle.hpp"
#include "hsaw/stats.hpp"

namespace hsaw {

inline constexpr const char* kVersion = "0.1.0";

struct GridSpec {
  double lo = 0.0;
  double hi = 5.0;
  double step = 0.05;

  std::vector<double> points() const { return uniform_grid(lo, hi, step); }
};

struct ExperimentConfig {
  ChainConfig chain;
  std::size_t n_bridges = 20;
  double sigma = SleConstants::sigma;
  HistogramSpec histogram;
  double fit_lo = -1.5;
  double fit_hi = 1.5;
  GridSpec cdf_grid{0.0, 5.0, 0.05};
  GridSpec rho_grid{-5.0, 5.0, 0.01};
  double cdf_tol = 1e-10;
  std::filesystem::path output_dir = "out";
  std::size_t batches_per_chain = 5;
  std::size_t threads = 0;  // 0: one per hardware thread
  std::size_t enum_max_len = 12;
  std::size_t enum_cap = kDefaultEnumerationCap;
  std::optional<double> mu;

  void validate() const {
    chain.validate();
    if (n_bridges < 1) throw ConfigError("n_bridges must be >= 1");
    if (!(sigma > 0)) throw ConfigError("sigma must be positive");
    if (!(histogram.lo < histogram.hi) || histogram.bins < 1) throw ConfigError("invalid histogram spec");
    if (!(fit_lo < fit_hi)) throw ConfigError("fit window must satisfy lo < hi");
    if (fit_lo < histogram.lo || fit_hi > histogram.hi) throw ConfigError("fit window must lie inside the histogram range");
    for (const GridSpec* g : {&cdf_grid, &rho_grid}) {
      if (!(g->step > 0) || !(g->hi >= g->lo)) throw ConfigError("invalid grid spec");
    }
    if (!(cdf_tol > 0)) throw ConfigError("cdf_tol must be positive");
    if (batches_per_chain < 1) throw ConfigError("batches_per_chain must be >= 1");
    if (enum_max_len > enum_cap) throw ConfigError("enum_max_len exceeds enum_cap");
    if (mu && !(*mu > 1.0)) throw ConfigError("mu must exceed 1");
  }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

template <typename T>
T parse_setting(const std::string& key, const std::string& value, T (*parse)(const std::string&)) {
  try {
    return parse(value);
  } catch (const FormatError&) {
    throw ConfigError("config key '" + key + "': invalid value '" + value + "'");
  }
}

inline std::pair<double, double> parse_pair(const std::string& key, const std::string& value) {
  const auto parts = split(value, ',');
  if (parts.size() != 2) throw ConfigError("config key '" + key + "' expects LO,HI");
  return {parse_setting(key, parts[0], parse_double), parse_setting(key, parts[1], parse_double)};
}

}  // namespace detail

/// Applies one key = value setting; unknown keys are errors.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_setting;
  auto u64 = [&] { return parse_setting(key, value, parse_u64); };
  auto dbl = [&] { return parse_setting(key, value, parse_double); };
  if (key == "steps") c.chain.steps = static_cast<std::size_t>(u64());
  else if (key == "warmup") c.chain.warmup_iterations = u64();
  else if (key == "stride") c.chain.stride = u64();
  else if (key == "samples") c.chain.total_samples = u64();
  else if (key == "seed") c.chain.seed = u64();
  else if (key == "chains") c.chain.chains = static_cast<std::size_t>(u64());
  else if (key == "pivot_sites") {
    if (value == "uniform") c.chain.pivot_sites = PivotSites::uniform;
    else if (value == "mixed") c.chain.pivot_sites = PivotSites::mixed;
    else throw ConfigError("config key 'pivot_sites' expects uniform or mixed, got '" + value + "'");
  }
  else if (key == "n_bridges") c.n_bridges = static_cast<std::size_t>(u64());
  else if (key == "sigma") c.sigma = dbl();
  else if (key == "hist_lo") c.histogram.lo = dbl();
  else if (key == "hist_hi") c.histogram.hi = dbl();
  else if (key == "hist_bins") c.histogram.bins = static_cast<std::size_t>(u64());
  else if (key == "fit_window") std::tie(c.fit_lo, c.fit_hi) = detail::parse_pair(key, value);
  else if (key == "cdf_lo") c.cdf_grid.lo = dbl();
  else if (key == "cdf_hi") c.cdf_grid.hi = dbl();
  else if (key == "cdf_step") c.cdf_grid.step = dbl();
  else if (key == "cdf_tol") c.cdf_tol = dbl();
  else if (key == "rho_lo") c.rho_grid.lo = dbl();
  else if (key == "rho_hi") c.rho_grid.hi = dbl();
  else if (key == "rho_step") c.rho_grid.step = dbl();
  else if (key == "out") c.output_dir = value;
  else if (key == "batches_per_chain") c.batches_per_chain = static_cast<std::size_t>(u64());
  else if (key == "threads") c.threads = static_cast<std::size_t>(u64());
  else if (key == "enum_max_len") c.enum_max_len = static_cast<std::size_t>(u64());
  else if (key == "enum_cap") c.enum_cap = static_cast<std::size_t>(u64());
  else if (key == "mu") c.mu = dbl();
  else throw ConfigError("unknown config key '" + key + "'");
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c;
  std::map<std::string, std::string> kv;
  try {
    kv = read_key_values(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [k, v] : kv) apply_setting(c, k, v);
  return c;
}

/// The effective configuration as key = value pairs (17-digit floats).
inline std::map<std::string, std::string> config_snapshot(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  kv["steps"] = std::to_string(c.chain.steps);
  kv["warmup"] = std::to_string(c.chain.warmup());
  kv["stride"] = std::to_string(c.chain.stride);
  kv["samples"] = std::to_string(c.chain.total_samples);
  kv["seed"] = std::to_string(c.chain.seed);
  kv["chains"] = std::to_string(c.chain.chains);
  kv["pivot_sites"] = c.chain.pivot_sites == PivotSites::mixed ? "mixed" : "uniform";
  kv["n_bridges"] = std::to_string(c.n_bridges);
  kv["sigma"] = format_double(c.sigma);
  kv["hist_lo"] = format_double(c.histogram.lo);
  kv["hist_hi"] = format_double(c.histogram.hi);
  kv["hist_bins"] = std::to_string(c.histogram.bins);
  kv["fit_window"] = format_double(c.fit_lo) + "," + format_double(c.fit_hi);
  kv["cdf_lo"] = format_double(c.cdf_grid.lo);
  kv["cdf_hi"] = format_double(c.cdf_grid.hi);
  kv["cdf_step"] = format_double(c.cdf_grid.step);
  kv["cdf_tol"] = format_double(c.cdf_tol);
  kv["rho_lo"] = format_double(c.rho_grid.lo);
  kv["rho_hi"] = format_double(c.rho_grid.hi);
  kv["rho_step"] = format_double(c.rho_grid.step);
  kv["out"] = c.output_dir.string();
  kv["batches_per_chain"] = std::to_string(c.batches_per_chain);
  kv["enum_max_len"] = std::to_string(c.enum_max_len);
  kv["enum_cap"] = std::to_string(c.enum_cap);
  if (c.mu) kv["mu"] = format_double(*c.mu);
  return kv;
}

// ---------------------------------------------------------------------------
// Manifest

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string start_time;
  std::string end_time;
  nlohmann::json counts = nlohmann::json::object();
  std::vector<std::filesystem::path> files;

  void write(const std::filesystem::path& dir) const {
    nlohmann::json j;
    j["command"] = command;
    j["code_version"] = kVersion;
    j["config"] = config;
    j["seed"] = seed;
    j["start_time"] = start_time;
    j["end_time"] = end_time;
    j["counts"] = counts;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files) {
      j["files"].push_back({{"path", f.filename().string()}, {"checksum", file_checksum(f)}});
    }
    std::ofstream out(dir / ("manifest_" + command + ".json"));
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  }
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// sample

/// Called from the chain's worker thread for every snapshot.
using SnapshotObserver =
    std::function<void(std::size_t chain, std::uint64_t iter, const HalfPlaneWalk&, const BridgeDecomposition&)>;

struct ChainSummary {
  std::uint64_t snapshots = 0;
  std::uint64_t records = 0;
  std::uint64_t discarded = 0;  // fewer than n_bridges bridge points
  std::uint64_t attempts = 0;
};

struct SampleRun {
  std::vector<TaggedRecord> records;  // chain order, then iteration order
  std::vector<ChainSummary> chains;
  std::vector<std::filesystem::path> files;

  std::uint64_t discarded() const {
    std::uint64_t d = 0;
    for (const auto& c : chains) d += c.discarded;
    return d;
  }
};

/// Runs every chain of the config (in parallel up to `threads`), keeps the
/// records of walks with at least n_bridges bridge points, and writes
/// samples_chain_<c>.csv, the merged samples.csv and manifest_sample.json.
inline SampleRun cmd_sample(const ExperimentConfig& cfg, const SnapshotObserver& observer = {}) {
  cfg.validate();
  const std::string start = utc_timestamp();
  ensure_dir(cfg.output_dir);
  const std::size_t n_chains = cfg.chain.chains;
  std::vector<std::vector<TaggedRecord>> per_chain(n_chains);
  std::vector<ChainSummary> summaries(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);

  auto run_chain = [&](std::size_t c) {
    try {
      ChainSummary& s = summaries[c];
      sample_chain(cfg.chain, c, [&](std::uint64_t iter, const HalfPlaneWalk& w) {
        ++s.snapshots;
        const BridgeDecomposition d = bridge_points(w);
        if (observer) observer(c, iter, w, d);
        const auto rec = make_sample(w.sites(), d, cfg.n_bridges, cfg.sigma);
        if (!rec) {
          ++s.discarded;
          return;
        }
        ++s.records;
        per_chain[c].push_back({c, iter, *rec});
      });
      s.attempts = cfg.chain.warmup() + cfg.chain.stride * cfg.chain.total_samples;
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_chains);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chains; ++c) run_chain(c);
  } else {
    std::atomic<std::size_t> next{0};
    const std::function<void()> worker = [&] {
      for (std::size_t c; (c = next.fetch_add(1)) < n_chains;) run_chain(c);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SampleRun run;
  run.chains = summaries;
  for (std::size_t c = 0; c < n_chains; ++c) {
    const auto path = cfg.output_dir / ("samples_chain_" + std::to_string(c) + ".csv");
    write_samples(path, per_chain[c]);
    run.files.push_back(path);
    run.records.insert(run.records.end(), per_chain[c].begin(), per_chain[c].end());
  }
  const auto merged = cfg.output_dir / "samples.csv";
  write_samples(merged, run.records);
  run.files.push_back(merged);

  RunManifest m;
  m.command = "sample";
  m.config = config_snapshot(cfg);
  m.seed = cfg.chain.seed;
  m.start_time = start;
  m.end_time = utc_timestamp();
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : summaries) {
    per.push_back({{"snapshots", s.snapshots}, {"records", s.records}, {"discarded_insufficient_bridges", s.discarded},
                   {"pivot_attempts", s.attempts}});
  }
  m.counts = {{"records", run.records.size()}, {"discarded_insufficient_bridges", run.discarded()}, {"chains", per}};
  m.files = run.files;
  m.write(cfg.output_dir);
  return run;
}

// ---------------------------------------------------------------------------
// analyze

struct HistogramReport {
  WeightedHistogram histogram;
  std::vector<double> std_errors;
  std::vector<double> rho_mid;
  std::vector<double> rho_bin_mean;
};

struct CdfComparison {
  std::vector<double> xi;
  std::vector<double> simulated;
  std::vector<double> conjectured;
  KsResult ks;          // over the grid and all jumps inside it
  KsResult grid_max;    // largest |diff| on the grid itself
};

struct AnalysisResult {
  std::size_t records = 0;
  HistogramReport weighted;
  HistogramReport unweighted;
  FitResult fit_weighted;
  FitResult fit_unweighted;
  CdfComparison cdf;
};

/// Mean of rho over [a, a + dx].
inline double rho_bin_mean(double a, double dx) {
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  return adaptive_simpson(rho, a, a + dx, opt) / dx;
}

namespace detail {

/// Records grouped by chain, each chain cut into `per_chain` contiguous batches.
inline std::vector<std::vector<SampleRecord>> batch_records(const std::vector<TaggedRecord>& records,
                                                            std::size_t per_chain) {
  std::map<std::uint64_t, std::vector<SampleRecord>> by_chain;
  for (const auto& r : records) by_chain[r.chain].push_back(r.record);
  std::vector<std::vector<SampleRecord>> out;
  for (const auto& [chain, recs] : by_chain) {
    const std::size_t k = std::min(per_chain, std::max<std::size_t>(recs.size(), 1));
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t lo = recs.size() * b / k;
      const std::size_t hi = recs.size() * (b + 1) / k;
      out.emplace_back(recs.begin() + static_cast<std::ptrdiff_t>(lo), recs.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  }
  return out;
}

inline HistogramReport histogram_report(const std::vector<std::vector<SampleRecord>>& batches,
                                        const HistogramSpec& spec, Weighting weighting) {
  std::vector<WeightedHistogram> parts;
  WeightedHistogram all(spec);
  for (const auto& b : batches) {
    parts.push_back(weighted_histogram(b, spec, Field::exit_x, weighting));
    all.merge(parts.back());
  }
  HistogramReport r{all, {}, {}, {}};
  r.std_errors = parts.size() >= 2 ? batch_standard_errors(parts) : std::vector<double>(spec.bins, 0.0);
  for (std::size_t b = 0; b < spec.bins; ++b) {
    r.rho_mid.push_back(rho(spec.bin_mid(b)));
    r.rho_bin_mean.push_back(rho_bin_mean(spec.bin_lo(b), spec.dx()));
  }
  return r;
}

inline void write_histogram(const std::filesystem::path& path, const HistogramReport& r) {
  CsvWriter w(path, {"bin_lo", "bin_mid", "weight_sum", "normalized_density", "std_error", "rho", "rho_bin_mean"});
  const auto& spec = r.histogram.spec();
  for (std::size_t b = 0; b < spec.bins; ++b) {
    w.row({format_double(spec.bin_lo(b)), format_double(spec.bin_mid(b)), format_double(r.histogram.weight_sums()[b]),
           format_double(r.histogram.normalized_density(b)), format_double(r.std_errors[b]), format_double(r.rho_mid[b]),
           format_double(r.rho_bin_mean[b])});
  }
  w.close();
}

inline nlohmann::json fit_json(const FitResult& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"residual_rms", f.residual_rms},
          {"window", {f.window_lo, f.window_hi}},
          {"n_points", f.n_points}};
}

inline void write_fit_points(const std::filesystem::path& path, const FitResult& f) {
  CsvWriter w(path, {"log_cosh_m2", "log_weight_sum"});
  for (std::size_t i = 0; i < f.log_x.size(); ++i) w.row({format_double(f.log_x[i]), format_double(f.log_y[i])});
  w.close();
}

}  // namespace detail

/// Fine tabulation of rightmost_cdf over [0, hi] for KS evaluation at jumps.
inline PredictionTable fine_rightmost_cdf(double hi, double tol) {
  return tabulate_rightmost_cdf(uniform_grid(0.0, hi, 0.001), tol);
}

/// In-memory analysis of sample records.
inline AnalysisResult analyze_records(const ExperimentConfig& cfg, const std::vector<TaggedRecord>& records) {
  cfg.validate();
  if (records.empty()) throw std::runtime_error("analysis needs at least one sample record");
  AnalysisResult a;
  a.records = records.size();
  const auto batches = detail::batch_records(records, cfg.batches_per_chain);
  a.weighted = detail::histogram_report(batches, cfg.histogram, Weighting::ensemble);
  a.unweighted = detail::histogram_report(batches, cfg.histogram, Weighting::uniform);
  a.fit_weighted = loglog_fit(a.weighted.histogram, cfg.fit_lo, cfg.fit_hi);
  a.fit_unweighted = loglog_fit(a.unweighted.histogram, cfg.fit_lo, cfg.fit_hi);

  std::vector<SampleRecord> plain;
  plain.reserve(records.size());
  for (const auto& r : records) plain.push_back(r.record);
  const WeightedEcdf ecdf = weighted_ecdf(plain, Field::rightmost, Weighting::ensemble);
  CdfComparison& c = a.cdf;
  c.xi = cfg.cdf_grid.points();
  c.grid_max = {-1.0, c.xi.front()};
  for (double xi : c.xi) {
    const double sim = ecdf(xi);
    const double conj = rightmost_cdf(xi, cfg.cdf_tol);
    c.simulated.push_back(sim);
    c.conjectured.push_back(conj);
    if (std::abs(sim - conj) > c.grid_max.distance) c.grid_max = {std::abs(sim - conj), xi};
  }
  const double lo = std::max(0.0, cfg.cdf_grid.lo);
  const PredictionTable fine = fine_rightmost_cdf(std::max(cfg.cdf_grid.hi, 0.001), cfg.cdf_tol);
  auto conjectured = [&](double xi) { return xi <= 0.0 ? 0.0 : fine(xi); };
  std::vector<double> ks_grid = fine.grid;
  std::erase_if(ks_grid, [&](double x) { return x < lo || x > cfg.cdf_grid.hi; });
  for (double xi : c.xi) ks_grid.push_back(xi);
  std::sort(ks_grid.begin(), ks_grid.end());
  c.ks = ks_distance(ecdf, conjectured, ks_grid);
  return a;
}

/// Writes the analysis products into cfg.output_dir.
inline std::vector<std::filesystem::path> write_analysis(const ExperimentConfig& cfg, const AnalysisResult& a) {
  ensure_dir(cfg.output_dir);
  const auto& dir = cfg.output_dir;
  std::vector<std::filesystem::path> files;
  detail::write_histogram(dir / "histogram_exit_weighted.csv", a.weighted);
  detail::write_histogram(dir / "histogram_exit_unweighted.csv", a.unweighted);
  write_json(dir / "fit_weighted.json", detail::fit_json(a.fit_weighted));
  write_json(dir / "fit_unweighted.json", detail::fit_json(a.fit_unweighted));
  detail::write_fit_points(dir / "loglog_points_weighted.csv", a.fit_weighted);
  detail::write_fit_points(dir / "loglog_points_unweighted.csv", a.fit_unweighted);
  {
    CsvWriter w(dir / "cdf_rightmost.csv", {"xi", "simulated", "conjectured", "diff"});
    for (std::size_t i = 0; i < a.cdf.xi.size(); ++i) {
      w.row({format_double(a.cdf.xi[i]), format_double(a.cdf.simulated[i]), format_double(a.cdf.conjectured[i]),
             format_double(a.cdf.simulated[i] - a.cdf.conjectured[i])});
    }
    w.close();
  }
  nlohmann::json summary = {{"records", a.records},
                            {"ks_distance", a.cdf.ks.distance},
                            {"ks_location", a.cdf.ks.location},
                            {"grid_max_abs_diff", a.cdf.grid_max.distance},
                            {"grid_max_location", a.cdf.grid_max.location}};
  write_json(dir / "analysis.json", summary);
  for (const char* f : {"histogram_exit_weighted.csv", "histogram_exit_unweighted.csv", "fit_weighted.json",
                        "fit_unweighted.json", "loglog_points_weighted.csv", "loglog_points_unweighted.csv",
                        "cdf_rightmost.csv", "analysis.json"}) {
    files.push_back(dir / f);
  }
  return files;
}

/// Reads samples.csv from `input_dir` and writes the analysis products.
inline AnalysisResult cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& input_dir) {
  const std::string start = utc_timestamp();
  const auto records = read_samples(input_dir / "samples.csv");
  AnalysisResult a = analyze_records(cfg, records);
  RunManifest m;
  m.command = "analyze";
  m.config = config_snapshot(cfg);
  m.seed = cfg.chain.seed;
  m.start_time = start;
  m.files = write_analysis(cfg, a);
  m.end_time = utc_timestamp();
  m.counts = {{"records", a.records}};
  m.write(cfg.output_dir);
  return a;
}

// ---------------------------------------------------------------------------
// report

struct ReportThresholds {
  double density_window = 2.0;  // bins with |centre| <= this are checked
  double max_std_errors = 4.0;
  double max_sup_deviation = 0.02;
  double slope_lo = 0.575;
  double slope_hi = 0.675;
  double control_slope_max = 0.55;
  double min_slope_gap = 0.1;
  double max_ks = 0.03;
  double ks_location_max = 1.0;
};

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct DensityCheck {
  double sup_deviation = 0.0;
  double max_z = 0.0;
  double worst_bin_mid = 0.0;
  std::size_t bins = 0;
};

inline DensityCheck density_check(const HistogramReport& h, double window) {
  DensityCheck d;
  const auto& spec = h.histogram.spec();
  for (std::size_t b = 0; b < spec.bins; ++b) {
    const double mid = spec.bin_mid(b);
    if (std::abs(mid) > window + 1e-9 * spec.dx()) continue;
    ++d.bins;
    const double dev = std::abs(h.histogram.normalized_density(b) - h.rho_bin_mean[b]);
    d.sup_deviation = std::max(d.sup_deviation, dev);
    const double z = h.std_errors[b] > 0 ? dev / h.std_errors[b] : (dev > 0 ? INFINITY : 0.0);
    if (z > d.max_z) {
      d.max_z = z;
      d.worst_bin_mid = mid;
    }
  }
  return d;
}

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

/// The density, exponent and excursion checks on an analysed run.
inline std::vector<CheckLine> evaluate_report(const AnalysisResult& a, const ReportThresholds& t = {}) {
  std::vector<CheckLine> out;
  const DensityCheck d = density_check(a.weighted, t.density_window);
  out.push_back({"exit density vs rho", d.bins > 0 && d.max_z <= t.max_std_errors && d.sup_deviation <= t.max_sup_deviation,
                 "bins=" + std::to_string(d.bins) + " max|z|=" + fmt(d.max_z, 4) + " (at " + fmt(d.worst_bin_mid, 3) +
                     ") sup=" + fmt(d.sup_deviation, 4) + " limits z<=" + fmt(t.max_std_errors) +
                     " sup<=" + fmt(t.max_sup_deviation)});
  const double sw = a.fit_weighted.slope, su = a.fit_unweighted.slope;
  out.push_back({"boundary exponent", sw >= t.slope_lo && sw <= t.slope_hi && su < t.control_slope_max &&
                                          std::abs(sw - su) > t.min_slope_gap,
                 "weighted=" + fmt(sw) + " in [" + fmt(t.slope_lo) + "," + fmt(t.slope_hi) + "], control=" + fmt(su) +
                     " < " + fmt(t.control_slope_max) + ", gap=" + fmt(std::abs(sw - su), 4) + " > " +
                     fmt(t.min_slope_gap)});
  out.push_back({"rightmost excursion CDF", a.cdf.ks.distance <= t.max_ks && a.cdf.grid_max.location < t.ks_location_max,
                 "KS=" + fmt(a.cdf.ks.distance, 4) + " <= " + fmt(t.max_ks) + ", max diff on grid at xi=" +
                     fmt(a.cdf.grid_max.location, 3) + " < " + fmt(t.ks_location_max)});
  return out;
}

/// Analyses `input_dir` and prints one PASS/FAIL line per check. Returns 0
/// when all pass, 3 otherwise.
inline int cmd_report(const ExperimentConfig& cfg, const std::filesystem::path& input_dir, std::ostream& os,
                      const ReportThresholds& t = {}) {
  const AnalysisResult a = cmd_analyze(cfg, input_dir);
  const auto lines = evaluate_report(a, t);
  nlohmann::json j = nlohmann::json::array();
  bool ok = true;
  for (const auto& l : lines) {
    os << (l.pass ? "PASS " : "FAIL ") << l.name << ": " << l.detail << '\n';
    j.push_back({{"check", l.name}, {"pass", l.pass}, {"detail", l.detail}});
    ok = ok && l.pass;
  }
  write_json(cfg.output_dir / "report.json", j);
  return ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// enumerate / predict

struct EnumerationRun {
  EnumerationTable table;
  ConnectiveEstimate mu_estimate;
  std::optional<KestenSums> kesten;
};

inline EnumerationRun cmd_enumerate(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string start = utc_timestamp();
  ensure_dir(cfg.output_dir);
  EnumerationRun r;
  r.table = enumerate_table(cfg.enum_max_len, cfg.enum_cap);
  if (cfg.enum_max_len >= 6) r.mu_estimate = estimate_mu(r.table);
  if (cfg.mu) r.kesten = kesten_partial_sum(r.table, cfg.enum_max_len, *cfg.mu);
  const auto& t = r.table;
  const auto counts = cfg.output_dir / "enumeration_counts.csv";
  const auto heights = cfg.output_dir / "enumeration_heights.csv";
  {
    std::vector<std::string> header{"len", "c_n", "bridges", "irreducible"};
    if (r.kesten) {
      header.push_back("kesten_increment");
      header.push_back("kesten_partial_sum");
    }
    CsvWriter w(counts, header);
    for (std::size_t len = 1; len <= t.max_len; ++len) {
      std::vector<std::string> row{std::to_string(len), std::to_string(t.c_n[len]), std::to_string(t.bridges(len)),
                                   std::to_string(t.irreducible(len))};
      if (r.kesten) {
        row.push_back(format_double(r.kesten->increments[len]));
        row.push_back(format_double(r.kesten->partial_sums[len]));
      }
      w.row(row);
    }
    w.close();
  }
  {
    CsvWriter w(heights, {"len", "height", "bridges", "irreducible"});
    for (std::size_t len = 1; len <= t.max_len; ++len) {
      for (std::size_t h = 1; h <= len; ++h) {
        if (t.b_counts[len][h] == 0) continue;
        w.row({std::to_string(len), std::to_string(h), std::to_string(t.b_counts[len][h]),
               std::to_string(t.i_counts[len][h])});
      }
    }
    w.close();
  }
  nlohmann::json j = {{"max_len", t.max_len}};
  if (cfg.enum_max_len >= 6) j["mu_estimate"] = {{"mu", r.mu_estimate.mu}, {"method", r.mu_estimate.method}};
  if (cfg.mu) j["kesten_mu"] = *cfg.mu;
  const auto summary = cfg.output_dir / "enumeration.json";
  write_json(summary, j);
  RunManifest m;
  m.command = "enumerate";
  m.config = config_snapshot(cfg);
  m.start_time = start;
  m.end_time = utc_timestamp();
  m.files = {counts, heights, summary};
  m.write(cfg.output_dir);
  return r;
}

struct PredictionRun {
  PredictionTable rho;
  PredictionTable cdf;
};

inline PredictionRun cmd_predict(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string start = utc_timestamp();
  ensure_dir(cfg.output_dir);
  PredictionRun r{tabulate_rho(cfg.rho_grid.points()), tabulate_rightmost_cdf(cfg.cdf_grid.points(), cfg.cdf_tol)};
  const auto rho_path = cfg.output_dir / "rho.csv";
  const auto cdf_path = cfg.output_dir / "cdf.csv";
  {
    CsvWriter w(rho_path, {"x", "rho"});
    for (std::size_t i = 0; i < r.rho.grid.size(); ++i) w.row({format_double(r.rho.grid[i]), format_double(r.rho.values[i])});
    w.close();
  }
  {
    CsvWriter w(cdf_path, {"xi", "cdf"});
    for (std::size_t i = 0; i < r.cdf.grid.size(); ++i) w.row({format_double(r.cdf.grid[i]), format_double(r.cdf.values[i])});
    w.close();
  }
  RunManifest m;
  m.command = "predict";
  m.config = config_snapshot(cfg);
  m.start_time = start;
  m.end_time = utc_timestamp();
  m.files = {rho_path, cdf_path};
  m.write(cfg.output_dir);
  return r;
}

}  // namespace hsaw
