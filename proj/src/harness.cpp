#include "gff/harness.hpp"

#include <algorithm>
#include <cmath>
#include <csignal>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gff/error.hpp"
#include "gff/green.hpp"
#include "gff/rng.hpp"
#include "gff/sampler.hpp"

namespace gff {

using nlohmann::json;

namespace {

struct ExperimentInfo {
  Experiment id;
  std::string_view name;
  std::string_view target;
  std::string_view statistic;
};

constexpr ExperimentInfo kExperiments[] = {
    {Experiment::green_check, "green-check", "spectral covariance equals the Green's function", "max_abs_deviation"},
    {Experiment::covariance, "covariance", "Green's function is g log N up to bounded error on V_N^l",
     "variance_sup"},
    {Experiment::high_count, "high-count", "exponent of the number of eta-high points", "high_count"},
    {Experiment::disk_count, "disk-count", "exponent of alpha-high points in a disk of radius N^beta",
     "disk_count"},
    {Experiment::disk_count_conditional, "disk-count-conditional",
     "exponent of alpha-high points near an alpha-high point", "disk_count_given_high"},
    {Experiment::pairs, "pairs", "exponent rho of close pairs of alpha-high points", "pairs"},
    {Experiment::high_square, "high-square", "exponent of the largest square above the eta level",
     "high_square"},
    {Experiment::max_field, "max-field", "maximum over V_N^l against 2 sqrt(g) log N", "max"},
    {Experiment::cff_mean, "cff-mean", "entropic repulsion: conditioned mean height against sqrt(g) log N",
     "inner_mean"},
    {Experiment::cff_spike, "cff-spike", "conditioned field: exponent of the largest downward spike",
     "low_square"},
    {Experiment::cff_low, "cff-low", "conditioned field: exponent of the number of low points", "low_count"},
    {Experiment::theory_table, "theory-table", "closed-form exponents and the rho variational problem", "rho"},
};

const ExperimentInfo& info(Experiment e) {
  for (const auto& i : kExperiments)
    if (i.id == e) return i;
  throw Error(ErrorCode::precondition, "unknown experiment");
}

[[noreturn]] void invalid(std::string_view field, std::string_view why) {
  throw Error(ErrorCode::config_invalid, std::string(field) + ": " + std::string(why));
}

std::string short_num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

double sqrt_g() { return std::sqrt(theory::g()); }

// Constrained infimum of F_{2,beta} over the admissible tilts by a grid
// refined around the best point; independent of the closed form.
double grid_rho(double alpha, double beta) {
  auto admissible = [&](double g) { return theory::tilt_constraint(alpha, beta, g) >= 0.0; };
  double best_g = 0.0, best = std::numeric_limits<double>::infinity();
  const double top = 1.0 / alpha + 1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double g = top * i / 100000.0;
    if (admissible(g) && theory::f_h_beta(2.0, beta, g) < best) {
      best = theory::f_h_beta(2.0, beta, g);
      best_g = g;
    }
  }
  double step = top / 100000.0;
  for (int round = 0; round < 4; ++round) {
    const double lo = std::max(0.0, best_g - step), hi = best_g + step;
    step /= 500.0;
    for (double g = lo; g <= hi; g += step)
      if (admissible(g) && theory::f_h_beta(2.0, beta, g) < best) {
        best = theory::f_h_beta(2.0, beta, g);
        best_g = g;
      }
  }
  return 2.0 + 2.0 * beta - 2.0 * alpha * alpha * best;
}

std::string param_string(const ExperimentConfig& c, int n) {
  std::ostringstream s;
  s << "experiment=" << to_string(c.experiment);
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) s << ';' << k << '=' << format_double(*v);
  };
  put("alpha", c.params.alpha);
  put("beta", c.params.beta);
  put("eta", c.params.eta);
  put("gamma", c.params.gamma);
  put("h", c.params.h);
  if (c.experiment == Experiment::disk_count) s << ";centers=" << c.centers;
  if (c.experiment == Experiment::disk_count_conditional) s << ";proposals=" << c.proposals;
  if (is_chain_experiment(c.experiment)) {
    s << ";burn_in=" << c.chain.burn_in.value_or(default_burn_in(n)) << ";sweeps=" << c.chain.sweeps
      << ";thinning=" << c.chain.thinning
      << ";order=" << (c.chain.order == SweepOrder::checkerboard ? "checkerboard" : "raster");
  }
  s << ";seed=" << c.master_seed;
  return s.str();
}

std::map<std::string, std::string> parse_params(std::string_view text) {
  std::map<std::string, std::string> out;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const std::string item(semi == std::string_view::npos ? text : text.substr(0, semi));
    const auto eq = item.find('=');
    if (eq != std::string::npos) out[item.substr(0, eq)] = item.substr(eq + 1);
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return out;
}

std::optional<double> param_double(const std::map<std::string, std::string>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) return std::nullopt;
  return std::stod(it->second);
}

using Rows = std::vector<std::vector<std::string>>;

std::vector<std::string> row(int n, const Rational& l, std::int64_t replica, std::string_view stat,
                             const std::string& params, double value) {
  return {std::to_string(n), l.str(), std::to_string(replica), std::string(stat), params, format_double(value)};
}

Rows collect_size(const ExperimentConfig& c, int n, const std::atomic<bool>* stop) {
  const auto domain = make_domain(n, c.l);
  const auto name = to_string(c.experiment);
  const auto stat = info(c.experiment).statistic;
  const auto params = param_string(c, n);
  Rows out;
  auto emit = [&](std::int64_t r, std::string_view s, double v) { out.push_back(row(n, c.l, r, s, params, v)); };

  switch (c.experiment) {
  case Experiment::green_check: {
    const auto table = green_matrix(domain, {c.dense_cap});
    const Eigen::MatrixXd spectral = spectral_covariance(domain);
    emit(0, stat, (spectral - table.values()).cwiseAbs().maxCoeff());
    emit(0, "solve_residual", table.max_residual());
    return out;
  }
  case Experiment::covariance: {
    const auto table = green_block(domain, domain.inner_sites(), {c.dense_cap});
    const auto dev = covariance_deviation(domain, table);
    emit(0, "variance_sup", dev.variance_sup);
    if (dev.pair_sup) emit(0, "pair_sup", *dev.pair_sup);
    return out;
  }
  case Experiment::disk_count_conditional: {
    auto fields = parallel_map<Field>(
        c.replicas, c.workers,
        [&](std::size_t r) { return sample_spectral(domain, replica_seed(c.master_seed, name, n, r)); }, stop);
    std::vector<Field> ready;
    for (auto& f : fields)
      if (f) ready.push_back(std::move(*f));
    if (ready.empty()) return out;
    try {
      const auto stats = count_in_disk_given_high(ready, *c.params.alpha, *c.params.beta, c.proposals,
                                                  replica_seed(c.master_seed, name, n, -1));
      for (std::size_t i = 0; i < stats.counts.size(); ++i)
        emit(static_cast<std::int64_t>(i), stat, static_cast<double>(stats.counts[i]));
      emit(0, "proposals", static_cast<double>(stats.proposals));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_accepted_samples) throw;
      emit(0, "proposals", static_cast<double>(c.proposals));
    }
    return out;
  }
  default:
    break;
  }

  auto per_replica = parallel_map<Rows>(
      c.replicas, c.workers,
      [&](std::size_t r) {
        Rows rows;
        auto put = [&](double v) { rows.push_back(row(n, c.l, static_cast<std::int64_t>(r), stat, params, v)); };
        const std::uint64_t seed = replica_seed(c.master_seed, name, n, static_cast<std::int64_t>(r));
        if (is_chain_experiment(c.experiment)) {
          ChainConfig cfg;
          cfg.burn_in_sweeps = c.chain.burn_in.value_or(default_burn_in(n));
          cfg.thinning = c.chain.thinning;
          cfg.seed = seed;
          cfg.sweep_order = c.chain.order;
          run_cff_chain(domain, cfg, c.chain.sweeps / c.chain.thinning, [&](const ChainState& st) {
            switch (c.experiment) {
            case Experiment::cff_mean: put(inner_mean(st.field)); break;
            case Experiment::cff_spike: put(max_low_square(st, *c.params.eta)); break;
            default: put(static_cast<double>(low_set(st, *c.params.eta).size())); break;
            }
          });
          return rows;
        }
        const Field field = sample_spectral(domain, seed);
        switch (c.experiment) {
        case Experiment::high_count: put(static_cast<double>(high_set(field, *c.params.eta).size())); break;
        case Experiment::high_square: put(max_square_min_above(field, high_level(domain, *c.params.eta))); break;
        case Experiment::pairs:
          put(static_cast<double>(pair_count(high_set(field, *c.params.alpha), *c.params.beta)));
          break;
        case Experiment::max_field: {
          double m = -std::numeric_limits<double>::infinity();
          for (const Point p : domain.inner_sites()) m = std::max(m, field(p));
          put(m);
          break;
        }
        case Experiment::disk_count: {
          const auto hs = high_set(field, *c.params.alpha);
          Stream centers({seed, tag_hash("centers")});
          const auto w = static_cast<std::uint64_t>(domain.inner_width());
          for (int k = 0; k < c.centers; ++k) {
            const Point x{domain.inner_lo() + static_cast<int>(centers.below(w)),
                          domain.inner_lo() + static_cast<int>(centers.below(w))};
            put(static_cast<double>(count_in_disk(hs, x, *c.params.beta)));
          }
          break;
        }
        default: throw Error(ErrorCode::precondition, "experiment has no replica statistic");
        }
        return rows;
      },
      stop);
  for (auto& r : per_replica)
    if (r) out.insert(out.end(), r->begin(), r->end());
  return out;
}

Rows collect_theory(const ExperimentConfig& c) {
  Rows out;
  const auto params = param_string(c, 0);
  for (const auto& p : theory::predicted_exponents(c.params))
    if (p.value) out.push_back(row(0, c.l, 0, p.name, params, *p.value));
  if (c.params.alpha && c.params.beta) {
    out.push_back(row(0, c.l, 0, "gamma_star", params, theory::gamma_star(*c.params.beta)));
    out.push_back(row(0, c.l, 0, "gamma_plus", params, theory::gamma_plus(*c.params.alpha)));
    out.push_back(row(0, c.l, 0, "rho_grid", params, grid_rho(*c.params.alpha, *c.params.beta)));
    if (c.params.gamma) {
      const auto lem = theory::lemma83_coefficients(*c.params.alpha, *c.params.beta, *c.params.gamma);
      out.push_back(row(0, c.l, 0, "lemma83_a", params, lem.a));
      out.push_back(row(0, c.l, 0, "lemma83_b", params, lem.b));
      out.push_back(row(0, c.l, 0, "lemma83_variance", params, lem.variance_coeff));
    }
  }
  return out;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

Band merge(Band base, const std::optional<Band>& over) {
  if (!over) return base;
  if (!over->kind.empty()) base.kind = over->kind;
  auto take = [](std::optional<double>& dst, const std::optional<double>& src) {
    if (src) dst = src;
  };
  take(base.lo, over->lo);
  take(base.hi, over->hi);
  take(base.half_width, over->half_width);
  take(base.tolerance, over->tolerance);
  take(base.growth, over->growth);
  if (over->half_width && !over->lo) base.lo.reset();
  if (over->half_width && !over->hi) base.hi.reset();
  return base;
}

std::optional<double> prediction_for(Experiment e, const std::map<std::string, std::string>& p) {
  theory::Params tp;
  tp.alpha = param_double(p, "alpha");
  tp.beta = param_double(p, "beta");
  tp.eta = param_double(p, "eta");
  std::string_view want;
  switch (e) {
  case Experiment::high_count: want = "high_count"; break;
  case Experiment::disk_count: want = "disk_count"; break;
  case Experiment::disk_count_conditional: want = "disk_count_given_high"; break;
  case Experiment::pairs: want = "rho"; break;
  case Experiment::high_square: want = "high_square"; break;
  case Experiment::cff_spike: want = "spike_width"; break;
  case Experiment::cff_low: want = "low_count"; break;
  case Experiment::max_field: return 1.0;
  case Experiment::cff_mean: return 2.0;
  default: return std::nullopt;
  }
  for (const auto& pr : theory::predicted_exponents(tp))
    if (pr.name == want) return pr.value;
  return std::nullopt;
}

} // namespace

std::string_view to_string(Experiment e) { return info(e).name; }

Experiment parse_experiment(std::string_view name) {
  for (const auto& i : kExperiments)
    if (i.name == name) return i.id;
  invalid("experiment", "unknown experiment '" + std::string(name) + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& i : kExperiments) v.push_back(i.id);
    return v;
  }();
  return all;
}

std::string_view experiment_target(Experiment e) { return info(e).target; }

bool is_chain_experiment(Experiment e) {
  return e == Experiment::cff_mean || e == Experiment::cff_spike || e == Experiment::cff_low;
}

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::pass: return "PASS";
  case Verdict::fail: return "FAIL";
  case Verdict::observational: return "OBSERVATIONAL";
  }
  return "?";
}

const Band& BandTable::at(Experiment e) const {
  const auto it = bands.find(to_string(e));
  if (it == bands.end()) invalid("bands", "no band for " + std::string(to_string(e)));
  return it->second;
}

BandTable load_bands(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open bands table " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    invalid("bands", e.what());
  }
  BandTable t;
  try {
    t.version = j.at("version").get<std::string>();
    if (j.contains("cff_budget")) {
      t.min_burn_in = j["cff_budget"].value("burn_in_sweeps", t.min_burn_in);
      t.min_states = j["cff_budget"].value("recorded_states", t.min_states);
    }
    for (const auto& [name, b] : j.at("experiments").items()) {
      parse_experiment(name);
      Band band;
      band.kind = b.at("kind").get<std::string>();
      auto opt = [&](const char* k, std::optional<double>& dst) {
        if (b.contains(k)) dst = b[k].get<double>();
      };
      opt("lo", band.lo);
      opt("hi", band.hi);
      opt("half_width", band.half_width);
      opt("tolerance", band.tolerance);
      opt("growth", band.growth);
      t.bands[name] = band;
    }
  } catch (const json::exception& e) {
    invalid("bands", e.what());
  }
  return t;
}

BandTable default_bands() { return load_bands(GFF_DEFAULT_BANDS_PATH); }

void validate(const ExperimentConfig& c) {
  const auto e = c.experiment;
  if (e != Experiment::theory_table) {
    if (c.ns.empty()) invalid("ns", "at least one lattice size is required");
    for (std::size_t i = 0; i < c.ns.size(); ++i) {
      if (c.ns[i] < 3) invalid("ns", "sizes must be >= 3");
      if (i > 0 && c.ns[i] <= c.ns[i - 1]) invalid("ns", "sizes must be strictly increasing");
    }
  }
  if (c.l.den <= 0 || c.l.num < 0 || 2 * c.l.num >= c.l.den) invalid("l", "margin must lie in [0, 1/2)");
  if (c.replicas < 1) invalid("replicas", "must be >= 1");
  auto need = [](const std::optional<double>& v, const char* field, double lo, double hi) {
    if (!v) invalid(field, "required by this experiment");
    if (!(*v > lo && *v < hi)) invalid(field, "must lie in (" + short_num(lo) + ", " + short_num(hi) + ")");
  };
  switch (e) {
  case Experiment::high_count:
  case Experiment::cff_spike:
  case Experiment::cff_low: need(c.params.eta, "eta", 0.0, 1.0); break;
  case Experiment::high_square: need(c.params.eta, "eta", -1.0, 1.0); break;
  case Experiment::disk_count:
  case Experiment::disk_count_conditional:
  case Experiment::pairs:
    need(c.params.alpha, "alpha", 0.0, 1.0);
    need(c.params.beta, "beta", 0.0, 1.0);
    if (e == Experiment::disk_count && *c.params.alpha > *c.params.beta) invalid("alpha", "must be <= beta");
    break;
  case Experiment::theory_table:
    if (c.params.alpha) need(c.params.alpha, "alpha", 0.0, 1.0);
    if (c.params.beta) need(c.params.beta, "beta", 0.0, 1.0);
    if (c.params.gamma && !(*c.params.gamma >= 0.0)) invalid("gamma", "must be >= 0");
    break;
  default: break;
  }
  if (is_chain_experiment(e)) {
    if (c.chain.burn_in && *c.chain.burn_in < 0) invalid("burn-in", "must be >= 0");
    if (c.chain.thinning < 1) invalid("thinning", "must be >= 1");
    if (c.chain.sweeps < c.chain.thinning) invalid("sweeps", "must be >= thinning");
  }
  if (e == Experiment::disk_count && c.centers < 1) invalid("centers", "must be >= 1");
  if (e == Experiment::disk_count_conditional && c.proposals < 1) invalid("proposals", "must be >= 1");
  for (const int n : c.ns) {
    const auto interior = static_cast<std::size_t>(n - 2) * static_cast<std::size_t>(n - 2);
    if (e == Experiment::green_check && interior > c.dense_cap)
      invalid("ns", "N=" + std::to_string(n) + " exceeds the dense-size cap");
    if (e == Experiment::covariance) {
      if (make_domain(n, c.l).inner_sites().size() > c.dense_cap)
        invalid("ns", "N=" + std::to_string(n) + " has more inner sites than the dense-size cap");
    }
  }
  if (c.band_override && !c.band_override->kind.empty()) {
    static const char* kinds[] = {"slope", "ratio", "trend", "max_abs", "no_growth"};
    if (std::find(std::begin(kinds), std::end(kinds), c.band_override->kind) == std::end(kinds))
      invalid("bands.kind", "unknown band kind '" + c.band_override->kind + "'");
  }
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::string_view experiment, int n, std::int64_t replica) {
  Stream s({master_seed, tag_hash(experiment), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replica)});
  return s.bits();
}

void run_indexed(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task,
                 const std::atomic<bool>* stop) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      if (stop && stop->load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

CsvTable collect(const ExperimentConfig& c, const std::atomic<bool>* stop) {
  validate(c);
  CsvTable t{{"N", "l", "replica", "statistic", "parameters", "value"}, {}};
  if (c.experiment == Experiment::theory_table) {
    t.rows = collect_theory(c);
    return t;
  }
  for (const int n : c.ns) {
    if (stop && stop->load()) break;
    auto rows = collect_size(c, n, stop);
    t.rows.insert(t.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return t;
}

Summary summarize(const CsvTable& raw, const BandTable& bands, const std::optional<Band>& band_override) {
  if (raw.header != std::vector<std::string>{"N", "l", "replica", "statistic", "parameters", "value"})
    invalid("raw", "unexpected CSV header");
  if (raw.rows.empty()) invalid("raw", "no rows to summarize");

  Summary s;
  s.bands_version = bands.version;
  const auto first_params = parse_params(raw.rows.front().at(4));
  if (!first_params.count("experiment")) invalid("raw", "parameters carry no experiment name");
  const Experiment e = parse_experiment(first_params.at("experiment"));
  s.experiment = std::string(to_string(e));
  s.target = std::string(experiment_target(e));
  s.statistic = std::string(info(e).statistic);
  s.parameters = first_params;
  s.parameters.erase("experiment");
  for (const auto k : {"burn_in", "sweeps", "thinning"}) s.parameters.erase(k);
  const Band band = merge(bands.at(e), band_override);

  // Group rows by statistic and N, keeping first-appearance order of N.
  std::map<std::string, std::map<int, std::vector<double>>> groups;
  std::map<int, std::map<std::string, std::string>> size_params;
  for (const auto& r : raw.rows) {
    if (r.size() != 6) invalid("raw", "row with wrong field count");
    const int n = std::stoi(r[0]);
    groups[r[3]][n].push_back(std::stod(r[5]));
    if (!size_params.count(n)) size_params[n] = parse_params(r[4]);
  }

  if (e == Experiment::theory_table) {
    for (const auto& [name, byn] : groups) s.values[name] = byn.begin()->second.front();
    const auto rho = s.values.find("rho");
    const auto grid = s.values.find("rho_grid");
    if (rho == s.values.end() || grid == s.values.end()) {
      s.notes.push_back("rho needs alpha and beta");
      return s;
    }
    const double tol = band.tolerance.value_or(1e-6);
    s.predicted = rho->second;
    s.verdict = std::fabs(rho->second - grid->second) <= tol ? Verdict::pass : Verdict::fail;
    s.notes.push_back("closed-form rho against grid search, tolerance " + short_num(tol));
    return s;
  }

  const double norm_max = 2.0 * sqrt_g();
  auto series = [&](const std::string& stat) {
    std::vector<SizeSummary> out;
    const auto it = groups.find(stat);
    if (it == groups.end()) return out;
    for (const auto& [n, values] : it->second) {
      SizeSummary z;
      z.n = n;
      z.rows = values.size();
      z.zeros = static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v <= 0; }));
      const double log_n = std::log(static_cast<double>(n));
      if (e == Experiment::cff_mean) {
        double sum = 0;
        for (double v : values) sum += v;
        z.location = sum / static_cast<double>(values.size());
        z.ratio = z.location / (sqrt_g() * log_n);
      } else {
        z.location = median(values);
        if (e == Experiment::max_field)
          z.ratio = z.location / (norm_max * log_n);
        else if (e == Experiment::green_check || e == Experiment::covariance)
          z.ratio = z.location;
        else
          z.ratio = z.location > 0 ? std::log(z.location) / log_n : -std::numeric_limits<double>::infinity();
      }
      out.push_back(z);
    }
    return out;
  };
  s.sizes = series(s.statistic);
  if (e == Experiment::covariance) {
    s.secondary_statistic = "pair_sup";
    s.secondary = series("pair_sup");
  }
  s.predicted = prediction_for(e, first_params);

  if (s.sizes.empty()) {
    s.verdict = Verdict::fail;
    s.notes.push_back("no " + s.statistic + " rows");
    return s;
  }

  auto bounds = [&]() -> std::pair<double, double> {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    if (band.half_width && s.predicted) {
      lo = *s.predicted - *band.half_width;
      hi = *s.predicted + *band.half_width;
    }
    if (band.lo) lo = *band.lo;
    if (band.hi) hi = *band.hi;
    return {lo, hi};
  };

  bool ok = true;
  bool judged = true;
  if (band.kind == "max_abs") {
    const double tol = band.tolerance.value_or(0.0);
    s.band_hi = tol;
    for (const auto& z : s.sizes) ok = ok && z.location <= tol;
  } else if (band.kind == "no_growth") {
    const double growth = band.growth.value_or(0.0);
    for (const auto* ser : {&s.sizes, &s.secondary}) {
      if (ser->empty()) continue;
      const double cap = ser->front().location + growth;
      for (const auto& z : *ser) ok = ok && z.location <= cap;
    }
    s.band_hi = s.sizes.front().location + growth;
    s.notes.push_back("each sup must stay within its value at the smallest N plus " + short_num(growth));
  } else if (band.kind == "slope") {
    std::vector<int> ns;
    std::vector<double> stats;
    for (const auto& z : s.sizes) {
      ns.push_back(z.n);
      stats.push_back(z.location);
    }
    try {
      s.fit = exponent_fit(ns, stats, s.predicted);
      const auto [lo, hi] = bounds();
      s.band_lo = lo;
      s.band_hi = hi;
      ok = s.fit->slope >= lo && s.fit->slope <= hi;
      if (!s.fit->censored.empty()) s.notes.push_back("zero medians censored from the fit");
    } catch (const Error& err) {
      if (err.code() != ErrorCode::insufficient_sizes) throw;
      judged = false;
      s.notes.push_back(std::string("no slope: ") + err.what());
    }
  } else if (band.kind == "ratio" || band.kind == "trend") {
    const auto [lo, hi] = bounds();
    s.band_lo = lo;
    s.band_hi = hi;
    if (band.kind == "ratio") {
      for (const auto& z : s.sizes) ok = ok && z.ratio >= lo && z.ratio <= hi;
    } else {
      for (std::size_t i = 0; i < s.sizes.size(); ++i) {
        ok = ok && s.sizes[i].location > 0;
        if (i > 0) ok = ok && s.sizes[i].ratio > s.sizes[i - 1].ratio;
      }
      ok = ok && s.sizes.back().ratio >= lo && s.sizes.back().ratio <= hi;
      s.notes.push_back("positive, increasing normalized statistic, band applied at the largest N");
    }
    if (s.sizes.size() >= 3) {
      std::vector<int> ns;
      std::vector<double> stats;
      for (const auto& z : s.sizes) {
        ns.push_back(z.n);
        stats.push_back(z.location);
      }
      try {
        s.fit = exponent_fit(ns, stats);
      } catch (const Error&) {
      }
    }
  } else {
    invalid("bands.kind", "unknown band kind '" + band.kind + "'");
  }
  s.verdict = !judged ? Verdict::observational : ok ? Verdict::pass : Verdict::fail;

  if (is_chain_experiment(e)) {
    bool budget = true;
    for (const auto& z : s.sizes) {
      const auto& p = size_params[z.n];
      const auto burn = param_double(p, "burn_in").value_or(0.0);
      budget = budget && burn >= static_cast<double>(bands.min_burn_in) &&
               z.rows >= static_cast<std::size_t>(bands.min_states);
    }
    s.notes.push_back("MCMC-limited: heat-bath chain from the zero field; finite burn-in biases the conditioned law");
    if (!budget) {
      if (s.verdict != Verdict::observational)
        s.notes.push_back(std::string("band verdict would be ") + std::string(to_string(s.verdict)));
      s.notes.push_back("budget below " + std::to_string(bands.min_burn_in) + " burn-in sweeps or " +
                        std::to_string(bands.min_states) + " recorded states per size");
      s.verdict = Verdict::observational;
    }
  }
  return s;
}

std::string summary_json(const Summary& s) {
  json j;
  j["experiment"] = s.experiment;
  j["target"] = s.target;
  j["statistic"] = s.statistic;
  j["bands_version"] = s.bands_version;
  j["parameters"] = s.parameters;
  auto sizes = [](const std::vector<SizeSummary>& v) {
    json a = json::array();
    for (const auto& z : v)
      a.push_back({{"N", z.n}, {"rows", z.rows}, {"zeros", z.zeros}, {"location", z.location}, {"ratio", z.ratio}});
    return a;
  };
  j["sizes"] = sizes(s.sizes);
  if (!s.secondary_statistic.empty()) {
    j["secondary_statistic"] = s.secondary_statistic;
    j["secondary"] = sizes(s.secondary);
  }
  if (!s.values.empty()) j["values"] = s.values;
  if (s.fit) {
    j["fit"] = {{"slope", s.fit->slope},
                {"intercept", s.fit->intercept},
                {"stderr", s.fit->stderr_},
                {"censored", s.fit->censored}};
  }
  j["predicted"] = s.predicted ? json(*s.predicted) : json(nullptr);
  j["band"] = {{"lo", s.band_lo ? json(*s.band_lo) : json(nullptr)},
               {"hi", s.band_hi ? json(*s.band_hi) : json(nullptr)}};
  j["verdict"] = std::string(to_string(s.verdict));
  j["notes"] = s.notes;
  j["interrupted"] = s.interrupted;
  return j.dump(2) + "\n";
}

CsvTable summary_table(const Summary& s) {
  CsvTable t{{"experiment", "N", "statistic", "rows", "zeros", "location", "ratio", "slope", "predicted", "band_lo",
              "band_hi", "verdict"},
             {}};
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  const std::string slope = s.fit ? format_double(s.fit->slope) : std::string();
  auto add = [&](const std::string& stat, const std::vector<SizeSummary>& v) {
    for (const auto& z : v)
      t.rows.push_back({s.experiment, std::to_string(z.n), stat, std::to_string(z.rows), std::to_string(z.zeros),
                        format_double(z.location), format_double(z.ratio), slope, opt(s.predicted), opt(s.band_lo),
                        opt(s.band_hi), std::string(to_string(s.verdict))});
  };
  add(s.statistic, s.sizes);
  add(s.secondary_statistic, s.secondary);
  for (const auto& [name, v] : s.values)
    t.rows.push_back({s.experiment, "", name, "1", "0", format_double(v), "", "", opt(s.predicted), "",
                      opt(s.band_hi), std::string(to_string(s.verdict))});
  return t;
}

Report run_experiment(const ExperimentConfig& c) {
  validate(c);
  const BandTable bands = c.bands_path ? load_bands(*c.bands_path) : default_bands();
  bands.at(c.experiment);

  g_interrupted.store(false);
  const auto previous = std::signal(SIGINT, on_sigint);
  CsvTable raw;
  try {
    raw = collect(c, &g_interrupted);
  } catch (...) {
    std::signal(SIGINT, previous);
    throw;
  }
  std::signal(SIGINT, previous);
  const bool interrupted = g_interrupted.load();

  Report rep;
  const auto name = std::string(to_string(c.experiment));
  std::error_code ec;
  if (!c.output_dir.empty()) std::filesystem::create_directories(c.output_dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + c.output_dir.string() + ": " + ec.message());
  rep.raw_path = c.output_dir / (name + ".csv");
  emit_csv(rep.raw_path, raw);

  if (raw.rows.empty()) {
    rep.summary.experiment = name;
    rep.summary.target = std::string(experiment_target(c.experiment));
    rep.summary.bands_version = bands.version;
    rep.summary.verdict = Verdict::observational;
    rep.summary.notes.push_back("no rows collected");
  } else {
    rep.summary = summarize(raw, bands, c.band_override);
  }
  rep.summary.interrupted = interrupted;
  if (interrupted) rep.summary.notes.push_back("interrupted: partial results");

  if (c.format == OutputFormat::json) {
    rep.summary_path = c.output_dir / (name + ".summary.json");
    std::ofstream out(rep.summary_path);
    out << summary_json(rep.summary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + rep.summary_path.string());
  } else {
    rep.summary_path = c.output_dir / (name + ".summary.csv");
    emit_csv(rep.summary_path, summary_table(rep.summary));
  }
  return rep;
}

} // namespace gff
