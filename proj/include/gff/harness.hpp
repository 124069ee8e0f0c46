#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gff/csv.hpp"
#include "gff/entropic.hpp"
#include "gff/extremes.hpp"
#include "gff/lattice.hpp"
#include "gff/theory.hpp"

namespace gff {

enum class Experiment {
  green_check,
  covariance,
  high_count,
  disk_count,
  disk_count_conditional,
  pairs,
  high_square,
  max_field,
  cff_mean,
  cff_spike,
  cff_low,
  theory_table,
};

std::string_view to_string(Experiment e);
/// Inverse of to_string; config_invalid on unknown names.
Experiment parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();
/// Human-readable name of the result an experiment probes.
std::string_view experiment_target(Experiment e);
bool is_chain_experiment(Experiment e);

enum class OutputFormat { csv, json };
enum class Verdict { pass, fail, observational };
std::string_view to_string(Verdict v);

/// How a summary is judged. Bands given as half_width are centred on the
/// theory prediction; lo/hi are absolute.
struct Band {
  std::string kind; // slope, ratio, trend, max_abs, no_growth
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> half_width;
  std::optional<double> tolerance;
  std::optional<double> growth;
};

struct BandTable {
  std::string version;
  std::int64_t min_burn_in = 5000;
  std::int64_t min_states = 200;
  std::map<std::string, Band, std::less<>> bands;

  const Band& at(Experiment e) const;
};

/// Reads the JSON bands table; io_error or config_invalid on failure.
BandTable load_bands(const std::filesystem::path& path);
/// The table shipped in data/bands.json.
BandTable default_bands();

struct ChainBudget {
  /// Unset means 50 N per size.
  std::optional<std::int64_t> burn_in;
  /// Post burn-in sweeps per chain; states recorded = sweeps / thinning.
  std::int64_t sweeps = 1000;
  std::int64_t thinning = 10;
  SweepOrder order = SweepOrder::checkerboard;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::theory_table;
  std::vector<int> ns;
  Rational l{1, 4};
  theory::Params params;
  int replicas = 10;
  std::uint64_t master_seed = 1;
  ChainBudget chain;
  /// Random centers per field for disk-count.
  int centers = 20;
  /// Proposal budget for disk-count-conditional.
  std::int64_t proposals = 200000;
  std::size_t dense_cap = 65536;
  /// 0 means one worker per hardware thread.
  unsigned workers = 0;
  std::filesystem::path output_dir;
  OutputFormat format = OutputFormat::json;
  std::optional<std::filesystem::path> bands_path;
  /// Replaces fields of the experiment's band.
  std::optional<Band> band_override;
};

/// Throws config_invalid naming the offending field.
void validate(const ExperimentConfig& config);

/// Seed of replica i: a pure function of (master seed, experiment, N, i).
std::uint64_t replica_seed(std::uint64_t master_seed, std::string_view experiment, int n, std::int64_t replica);

/// Runs f(0..count-1) on a worker pool and returns results in index order.
/// Tasks not yet started are skipped once `stop` becomes true.
template <class T>
std::vector<std::optional<T>> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& f,
                                           const std::atomic<bool>* stop = nullptr);

struct SizeSummary {
  int n = 0;
  std::size_t rows = 0;
  std::size_t zeros = 0;
  /// Median over rows; the mean for cff-mean.
  double location = 0.0;
  /// location normalized by log N (see experiment_target for the scale).
  double ratio = 0.0;
};

struct Summary {
  std::string experiment;
  std::string target;
  std::string statistic;
  std::map<std::string, std::string> parameters;
  std::vector<SizeSummary> sizes;
  /// Second judged statistic (pair_sup for covariance).
  std::string secondary_statistic;
  std::vector<SizeSummary> secondary;
  /// Size-free rows, e.g. the theory table.
  std::map<std::string, double> values;
  std::optional<ExponentEstimate> fit;
  std::optional<double> predicted;
  std::optional<double> band_lo;
  std::optional<double> band_hi;
  std::string bands_version;
  Verdict verdict = Verdict::observational;
  std::vector<std::string> notes;
  bool interrupted = false;
};

/// Raw rows (N, l, replica, statistic, parameters, value).
CsvTable collect(const ExperimentConfig& config, const std::atomic<bool>* stop = nullptr);

/// Summary and verdict computed from the raw rows alone.
Summary summarize(const CsvTable& raw, const BandTable& bands, const std::optional<Band>& band_override = {});

std::string summary_json(const Summary& summary);
CsvTable summary_table(const Summary& summary);

struct Report {
  Summary summary;
  std::filesystem::path raw_path;
  std::filesystem::path summary_path;
};

/// collect + summarize, writing <experiment>.csv and <experiment>.summary.{json,csv}
/// into output_dir. SIGINT stops new replicas; rows already computed are
/// still written and the summary is marked interrupted.
Report run_experiment(const ExperimentConfig& config);

// Template implementation.

void run_indexed(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task,
                 const std::atomic<bool>* stop);

template <class T>
std::vector<std::optional<T>> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& f,
                                           const std::atomic<bool>* stop) {
  std::vector<std::optional<T>> out(count);
  run_indexed(count, workers, [&](std::size_t i) { out[i] = f(i); }, stop);
  return out;
}

} // namespace gff
