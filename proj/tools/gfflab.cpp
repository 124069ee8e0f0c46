// gfflab: command-line front end of the experiment harness.
//
//   gfflab high-count --n 64 --n 128 --n 256 --eta 0.5 --replicas 20 --seed 7
//   gfflab theory --alpha 0.5 --beta 0.5 --format text
//   gfflab pairs --config runs/pairs.ini --replicas 50
//
// Exit status: 0 all PASS or OBSERVATIONAL, 1 FAIL, 2 configuration error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "gff/error.hpp"
#include "gff/harness.hpp"
#include "gff/theory.hpp"

namespace {

using gff::ErrorCode;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::vector<int> ns;
  std::string l;
  std::optional<double> alpha, beta, eta, gamma, h;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::int64_t sweeps = 0, burn_in = 0, thinning = 0;
  std::string order;
  int centers = 0;
  std::int64_t proposals = 0;
  std::size_t dense_cap = 0;
  unsigned workers = 0;
  std::string out;
  std::string format;
  std::string config;
  std::string bands;
};

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw gff::Error(ErrorCode::config_invalid, "ns: cannot parse '" + item + "'");
    }
  }
  return out;
}

gff::OutputFormat parse_format(const std::string& f) {
  if (f == "json") return gff::OutputFormat::json;
  if (f == "csv") return gff::OutputFormat::csv;
  throw gff::Error(ErrorCode::config_invalid, "format: expected csv or json, got '" + f + "'");
}

gff::SweepOrder parse_order(const std::string& o) {
  if (o == "checkerboard") return gff::SweepOrder::checkerboard;
  if (o == "raster") return gff::SweepOrder::raster;
  throw gff::Error(ErrorCode::config_invalid, "order: expected checkerboard or raster, got '" + o + "'");
}

// Reads an INI file with sections [experiment], [params], [chain], [output], [bands].
void apply_file(const std::string& path, gff::ExperimentConfig& c) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw gff::Error(ErrorCode::config_invalid, std::string("config: ") + e.what());
  }
  auto get = [&]<class T>(const char* key, auto&& set) {
    if (const auto v = tree.get_optional<std::string>(key)) {
      try {
        set(pt::ptree(*v).get_value<T>());
      } catch (const pt::ptree_bad_data&) {
        throw gff::Error(ErrorCode::config_invalid, std::string(key) + ": cannot parse '" + *v + "'");
      }
    }
  };
  if (const auto v = tree.get_optional<std::string>("experiment.ns")) c.ns = parse_sizes(*v);
  if (const auto v = tree.get_optional<std::string>("experiment.l")) c.l = gff::Rational::parse(*v);
  get.operator()<int>("experiment.replicas", [&](int v) { c.replicas = v; });
  get.operator()<std::uint64_t>("experiment.seed", [&](std::uint64_t v) { c.master_seed = v; });
  get.operator()<int>("experiment.centers", [&](int v) { c.centers = v; });
  get.operator()<std::int64_t>("experiment.proposals", [&](std::int64_t v) { c.proposals = v; });
  get.operator()<std::size_t>("experiment.dense_cap", [&](std::size_t v) { c.dense_cap = v; });
  get.operator()<unsigned>("experiment.workers", [&](unsigned v) { c.workers = v; });
  get.operator()<double>("params.alpha", [&](double v) { c.params.alpha = v; });
  get.operator()<double>("params.beta", [&](double v) { c.params.beta = v; });
  get.operator()<double>("params.eta", [&](double v) { c.params.eta = v; });
  get.operator()<double>("params.gamma", [&](double v) { c.params.gamma = v; });
  get.operator()<double>("params.h", [&](double v) { c.params.h = v; });
  get.operator()<std::int64_t>("chain.burn_in", [&](std::int64_t v) { c.chain.burn_in = v; });
  get.operator()<std::int64_t>("chain.sweeps", [&](std::int64_t v) { c.chain.sweeps = v; });
  get.operator()<std::int64_t>("chain.thinning", [&](std::int64_t v) { c.chain.thinning = v; });
  if (const auto v = tree.get_optional<std::string>("chain.order")) c.chain.order = parse_order(*v);
  if (const auto v = tree.get_optional<std::string>("output.dir")) c.output_dir = *v;
  if (const auto v = tree.get_optional<std::string>("output.format")) c.format = parse_format(*v);
  if (const auto v = tree.get_optional<std::string>("bands.file")) c.bands_path = *v;
  gff::Band over;
  bool any = false;
  if (const auto v = tree.get_optional<std::string>("bands.kind")) {
    over.kind = *v;
    any = true;
  }
  for (const auto& [key, slot] : std::initializer_list<std::pair<const char*, std::optional<double>*>>{
           {"bands.lo", &over.lo},
           {"bands.hi", &over.hi},
           {"bands.half_width", &over.half_width},
           {"bands.tolerance", &over.tolerance},
           {"bands.growth", &over.growth}}) {
    get.operator()<double>(key, [&, slot = slot](double v) {
      *slot = v;
      any = true;
    });
  }
  if (any) c.band_override = over;
}

void print_theory(const gff::theory::Params& p, const std::string& format) {
  const auto preds = gff::theory::predicted_exponents(p);
  if (format == "text") {
    std::size_t w = 0;
    for (const auto& pr : preds) w = std::max(w, pr.name.size());
    for (const auto& pr : preds) {
      std::printf("%-*s  ", static_cast<int>(w), pr.name.c_str());
      if (pr.value)
        std::printf("%12.6f  %s\n", *pr.value, pr.target.c_str());
      else
        std::printf("%12s  %s (%s)\n", "-", pr.target.c_str(), pr.note.c_str());
    }
    return;
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto& pr : preds) {
    nlohmann::json e{{"name", pr.name}, {"target", pr.target}};
    e["value"] = pr.value ? nlohmann::json(*pr.value) : nlohmann::json(nullptr);
    if (!pr.note.empty()) e["note"] = pr.note;
    j.push_back(e);
  }
  std::cout << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice Gaussian free field experiments"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Flags f;
  auto* o_n = app.add_option("--n", f.ns, "Lattice size (repeatable)");
  auto* o_l = app.add_option("--l", f.l, "Margin of the inner region, e.g. 1/4");
  auto* o_alpha = app.add_option("--alpha", f.alpha, "Height parameter alpha");
  auto* o_beta = app.add_option("--beta", f.beta, "Radius exponent beta");
  auto* o_eta = app.add_option("--eta", f.eta, "Level parameter eta");
  auto* o_gamma = app.add_option("--gamma", f.gamma, "Tilt gamma");
  auto* o_h = app.add_option("--weight", f.h, "Weight h of F_{h,beta}");
  auto* o_rep = app.add_option("--replicas", f.replicas, "Replicas (chains for cff-*) per size");
  auto* o_seed = app.add_option("--seed", f.seed, "Master seed");
  auto* o_sweeps = app.add_option("--sweeps", f.sweeps, "Post burn-in sweeps per chain");
  auto* o_burn = app.add_option("--burn-in", f.burn_in, "Burn-in sweeps (default 50 N)");
  auto* o_thin = app.add_option("--thinning", f.thinning, "Sweeps between recorded states");
  auto* o_order = app.add_option("--order", f.order, "Sweep order: checkerboard or raster");
  auto* o_centers = app.add_option("--centers", f.centers, "Random disk centers per field (disk-count)");
  auto* o_prop = app.add_option("--proposals", f.proposals, "Proposal budget (disk-count-conditional)");
  auto* o_cap = app.add_option("--dense-cap", f.dense_cap, "Largest dense Green table");
  auto* o_workers = app.add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  auto* o_out = app.add_option("--out", f.out, "Output directory (default results)");
  auto* o_format = app.add_option("--format", f.format, "csv or json (theory: json or text)");
  app.add_option("--config", f.config, "INI file; flags override it")->check(CLI::ExistingFile);
  auto* o_bands = app.add_option("--bands", f.bands, "Bands table (JSON)")->check(CLI::ExistingFile);

  auto* theory_cmd = app.add_subcommand("theory", "Print the predicted exponents");
  std::vector<CLI::App*> experiment_cmds;
  for (const auto e : gff::all_experiments())
    experiment_cmds.push_back(
        app.add_subcommand(std::string(gff::to_string(e)), std::string(gff::experiment_target(e))));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    gff::ExperimentConfig c;
    c.output_dir = "results";
    if (!f.config.empty()) apply_file(f.config, c);

    if (o_n->count()) c.ns = f.ns;
    if (o_l->count()) c.l = gff::Rational::parse(f.l);
    if (o_alpha->count()) c.params.alpha = f.alpha;
    if (o_beta->count()) c.params.beta = f.beta;
    if (o_eta->count()) c.params.eta = f.eta;
    if (o_gamma->count()) c.params.gamma = f.gamma;
    if (o_h->count()) c.params.h = f.h;
    if (o_rep->count()) c.replicas = f.replicas;
    if (o_seed->count()) c.master_seed = f.seed;
    if (o_sweeps->count()) c.chain.sweeps = f.sweeps;
    if (o_burn->count()) c.chain.burn_in = f.burn_in;
    if (o_thin->count()) c.chain.thinning = f.thinning;
    if (o_order->count()) c.chain.order = parse_order(f.order);
    if (o_centers->count()) c.centers = f.centers;
    if (o_prop->count()) c.proposals = f.proposals;
    if (o_cap->count()) c.dense_cap = f.dense_cap;
    if (o_workers->count()) c.workers = f.workers;
    if (o_out->count()) c.output_dir = f.out;
    if (o_bands->count()) c.bands_path = f.bands;

    if (theory_cmd->parsed()) {
      const std::string format = o_format->count() ? f.format : "json";
      if (format != "json" && format != "text")
        throw gff::Error(ErrorCode::config_invalid, "format: expected json or text, got '" + format + "'");
      print_theory(c.params, format);
      return 0;
    }
    if (o_format->count()) c.format = parse_format(f.format);
    for (std::size_t i = 0; i < experiment_cmds.size(); ++i)
      if (experiment_cmds[i]->parsed()) c.experiment = gff::all_experiments()[i];

    const auto report = gff::run_experiment(c);
    std::cout << gff::summary_json(report.summary);
    std::cerr << gff::to_string(c.experiment) << ": " << gff::to_string(report.summary.verdict) << " (raw "
              << report.raw_path.string() << ", summary " << report.summary_path.string() << ")\n";
    return report.summary.verdict == gff::Verdict::fail ? kExitFail : 0;
  } catch (const gff::Error& e) {
    std::cerr << "gfflab: " << e.what() << '\n';
    const bool config = e.code() == ErrorCode::config_invalid || e.code() == ErrorCode::invalid_margin;
    return config ? kExitConfig : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "gfflab: " << e.what() << '\n';
    return kExitFail;
  }
}
