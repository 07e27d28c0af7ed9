#pragma once

// Experiment orchestration: config → data → sampler → output directory.
//
//   [experiment]  name, seed, iters, burn_in, output
//   [data]        generator settings or a dataset path
//   [priors]      model hyperparameters
//   [sampler]     sampler choice and tuning
//
// Every experiment reads all of its keys before doing any work, so unknown
// keys are reported before a long run starts.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bridged/diagnostics.hpp"
#include "bridged/experiments/config.hpp"
#include "bridged/experiments/generators.hpp"
#include "bridged/experiments/output.hpp"
#include "bridged/models.hpp"
#include "bridged/predictive.hpp"
#include "bridged/samplers.hpp"

namespace bridged {

struct ExperimentResult {
  Trace trace;
  Json metrics = Json::object();
  std::vector<std::pair<std::string, std::string>> extra_files;  // name, contents
};

struct RunSettings {
  std::string name;
  std::uint64_t seed = 1;
  int iters = 0;
  int burn_in = 0;
};

namespace experiments {

inline RunSettings settings(const Config& c, int iters, int burn_in) {
  RunSettings s;
  s.name = c.get_string("experiment.name");
  const long long seed = c.get_int("experiment.seed", 1);
  if (seed < 0) throw c.error("experiment.seed", "must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.iters = static_cast<int>(c.get_count("experiment.iters", iters, 1, 100000000));
  s.burn_in = static_cast<int>(c.get_count("experiment.burn_in", burn_in, 0, 100000000));
  if (s.burn_in >= s.iters) throw c.error("experiment.burn_in", "must be smaller than experiment.iters");
  c.get_string("experiment.output", "");
  return s;
}

inline double positive(const Config& c, const std::string& key, double fallback) {
  const double v = c.get_double(key, fallback);
  if (!(v > 0.0)) throw c.error(key, "must be positive");
  return v;
}

inline Json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline std::pair<double, double> central_interval(const VectorXd& x, double level = 0.95) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {at(0.5 * (1.0 - level)), at(0.5 * (1.0 + level))};
}

// ---- LQE ----------------------------------------------------------------------

inline LqeData lqe_data(const Config& c, std::uint64_t seed) {
  const std::string path = c.get_string("data.path", "");
  const Index n = c.get_count("data.n", 1000);
  const auto data_seed = static_cast<std::uint64_t>(c.get_count("data.seed", static_cast<long long>(seed), 0));
  if (path.empty()) return gen_lqe_data(n, data_seed);
  const NumericTable t = read_numeric_table(path);
  LqeData d;
  d.x = t.values.col(t.column("x"));
  d.y = t.values.col(t.column("y"));
  d.validate();
  return d;
}

inline LqePriors lqe_priors(const Config& c) {
  return {positive(c, "priors.tau_sd", 1.0), positive(c, "priors.b_shape", 2.0), positive(c, "priors.b_scale", 5.0)};
}

inline ExperimentResult lqe(const Config& c) {
  const RunSettings s = settings(c, 10000, 2000);
  const std::string kind = c.get_string("sampler.kind", "rw");
  if (kind != "rw" && kind != "mala") throw c.error("sampler.kind", "expected rw or mala");
  const double mala_tau = positive(c, "sampler.mala_tau", 0.05);
  VectorXd init(2);
  init << positive(c, "sampler.init_tau", 1.0), positive(c, "sampler.init_b", 5.0);
  const LqePriors pr = lqe_priors(c);
  const LqeData data = lqe_data(c, s.seed);
  c.check_unused();

  const LqeModel model(data, pr);
  Rng rng = make_rng(s.seed, 11);
  ExperimentResult r;
  if (kind == "rw") {
    RwOptions o;
    o.iters = s.iters;
    o.burn_in = s.burn_in;
    r.trace = rw_metropolis(model, init, o, rng);
  } else {
    MalaOptions o;
    o.iters = s.iters;
    o.burn_in = s.burn_in;
    o.tau = mala_tau;
    r.trace = mala(model, init, o, rng);
  }
  r.metrics["n"] = data.y.size();
  r.metrics["sampler"] = kind;
  return r;
}

inline ExperimentResult lqe_pg(const Config& c) {
  const RunSettings s = settings(c, 10000, 2000);
  LatentNormalOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  o.nugget = positive(c, "sampler.nugget", 1e-2);
  o.rank_tol = positive(c, "sampler.rank_tol", 1e-8);
  o.init.resize(2);
  o.init << positive(c, "sampler.init_tau", 1.0), positive(c, "sampler.init_b", 5.0);
  const LqePriors pr = lqe_priors(c);
  const LqeData data = lqe_data(c, s.seed);
  c.check_unused();

  Rng rng = make_rng(s.seed, 12);
  ExperimentResult r;
  r.trace = gibbs_latent_normal(data, pr, o, rng);
  r.metrics["n"] = data.y.size();
  r.metrics["sampler"] = "polya_gamma_gibbs";
  return r;
}

// ---- classification -----------------------------------------------------------

struct ClassificationData {
  BmmcData data;
  VectorXd truth;  // ±1 for the unlabeled rows when known; empty otherwise
};

/// Table with a 0/1 label column: mask `mask_men` rows with sex 1 and
/// `mask_women` with sex 0. Without a path, the two-cluster toy set.
inline ClassificationData classification_data(const Config& c, std::uint64_t seed) {
  const std::string path = c.get_string("data.path", "");
  const std::string label = c.get_string("data.label_column", "DEATH_EVENT");
  const std::string sex = c.get_string("data.sex_column", "sex");
  const int men = static_cast<int>(c.get_count("data.mask_men", 97, 0));
  const int women = static_cast<int>(c.get_count("data.mask_women", 52, 0));
  const Index labeled = c.get_count("data.labeled", 30, 2);
  const Index unlabeled = c.get_count("data.unlabeled", 6, 0);
  const double sep = c.get_double("data.separation", 0.8);
  const auto data_seed = static_cast<std::uint64_t>(c.get_count("data.seed", static_cast<long long>(seed), 0));
  ClassificationData out;
  if (path.empty()) {
    out.data = gen_bmmc_toy(labeled, unlabeled, data_seed, sep);
    out.truth.resize(static_cast<Index>(out.data.unlabeled.size()));
    for (std::size_t j = 0; j < out.data.unlabeled.size(); ++j) out.truth(static_cast<Index>(j)) = out.data.y(out.data.unlabeled[j]);
    return out;
  }
  const LabeledTable t = load_labeled_table(path, label);
  const VectorXd sx = t.raw.values.col(t.raw.column(sex));
  out.data.x = t.x;
  out.data.y = t.y;
  out.data.unlabeled = mask_by_sex(sx, men, women, data_seed);
  out.truth.resize(static_cast<Index>(out.data.unlabeled.size()));
  for (std::size_t j = 0; j < out.data.unlabeled.size(); ++j) out.truth(static_cast<Index>(j)) = t.y(out.data.unlabeled[j]);
  return out;
}

inline void classification_metrics(ExperimentResult& r, const ClassificationData& d) {
  const VectorXd p = bmmc_predict_probs(r.trace);
  r.metrics["unlabeled"] = d.data.unlabeled;
  r.metrics["predictive_probability"] = vec_json(p);
  if (d.truth.size() == p.size() && p.size() > 0) {
    VectorXd labels = (d.truth.array() > 0.0).cast<double>();
    double correct = 0.0;
    for (Index j = 0; j < p.size(); ++j) correct += ((p(j) >= 0.5) == (labels(j) == 1.0));
    r.metrics["accuracy"] = correct / static_cast<double>(p.size());
    if (labels.sum() > 0.0 && labels.sum() < static_cast<double>(labels.size())) r.metrics["auc"] = auc_roc(p, labels);
  }
}

inline ExperimentResult bmmc(const Config& c) {
  const RunSettings s = settings(c, 1500, 500);
  BmmcPriors pr{positive(c, "priors.lambda_shape", 3.0), positive(c, "priors.lambda_rate", 2.0)};
  BmmcSamplerOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  o.init_lambda = positive(c, "sampler.init_lambda", 1.0);
  const ClassificationData d = classification_data(c, s.seed);
  c.check_unused();

  const BmmcModel model(d.data, pr);
  Rng rng = make_rng(s.seed, 13);
  ExperimentResult r;
  r.trace = bmmc_sampler(model, o, rng);
  classification_metrics(r, d);
  return r;
}

inline ExperimentResult gibbs_hinge(const Config& c) {
  const RunSettings s = settings(c, 1500, 500);
  GibbsHingeOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  o.lambda_prior = {positive(c, "priors.lambda_shape", 3.0), positive(c, "priors.lambda_rate", 2.0)};
  o.coef_sd = positive(c, "priors.coef_sd", 3.0);
  const ClassificationData d = classification_data(c, s.seed);
  c.check_unused();

  Rng rng = make_rng(s.seed, 14);
  ExperimentResult r;
  r.trace = gibbs_hinge_sampler(d.data, o, rng);
  classification_metrics(r, d);
  return r;
}

// ---- harmonization ------------------------------------------------------------

struct HarmonizationStudy {
  double ks_raw = 0.0, ks_smoothed = 0.0;
  double accuracy_raw = 0.0, accuracy_smoothed = 0.0;
};

/// KS between within- and between-group distances, and spectral-clustering
/// accuracy, for one distance matrix.
inline std::pair<double, double> group_separation(const MatrixXd& dist, const std::vector<int>& groups, std::uint64_t seed) {
  std::vector<double> within, between;
  for (Index a = 0; a < dist.rows(); ++a)
    for (Index b = 0; b < a; ++b)
      (groups[static_cast<std::size_t>(a)] == groups[static_cast<std::size_t>(b)] ? within : between).push_back(dist(a, b));
  const double ks = within.empty() || between.empty() ? 0.0 : ks_two_sample(within, between);
  return {ks, two_cluster_accuracy(spectral_cluster(dist, 2, seed), groups)};
}

inline MatrixXd raw_geodesic_distances(const HarmonizationData& d, double eta) {
  const Index s = d.subjects();
  std::vector<ShiftedFactor> f;
  for (const auto& l : d.laplacians) f.emplace_back(l, eta);
  MatrixXd out = MatrixXd::Zero(s, s);
  for (Index a = 0; a < s; ++a)
    for (Index b = 0; b < a; ++b)
      out(a, b) = out(b, a) = geodesic_distance(f[static_cast<std::size_t>(a)], f[static_cast<std::size_t>(b)]);
  return out;
}

inline ExperimentResult harmonization(const Config& c) {
  const RunSettings s = settings(c, 10000, 2000);
  const std::string path = c.get_string("data.path", "");
  const std::string groups_path = c.get_string("data.groups", "");
  HarmonizationGenOptions g;
  g.subjects = static_cast<int>(c.get_count("data.subjects", 20, 2));
  g.regions = static_cast<int>(c.get_count("data.regions", 24, 4));
  const auto comm = c.get_doubles("data.communities", {2, 3});
  if (comm.size() != 2) throw c.error("data.communities", "expected two community counts");
  g.communities = {static_cast<int>(comm[0]), static_cast<int>(comm[1])};
  g.noise_weight = c.get_double("data.noise_weight", g.noise_weight);
  g.noise_density = c.get_double("data.noise_density", g.noise_density);
  g.scale_sd = c.get_double("data.scale_sd", g.scale_sd);
  const auto data_seed = static_cast<std::uint64_t>(c.get_count("data.seed", static_cast<long long>(s.seed), 0));
  HarmonizationSamplerOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  o.priors.sigma2_shape = positive(c, "priors.sigma2_shape", 2.0);
  o.priors.sigma2_scale = positive(c, "priors.sigma2_scale", 1.0);
  o.priors.tau_shape = positive(c, "priors.tau_shape", 2.0);
  o.priors.tau_scale = positive(c, "priors.tau_scale", 1.0);
  const double eta = positive(c, "sampler.geodesic_eta", kDefaultGeodesicEta);
  const auto grid = c.get_doubles("sampler.grid", default_harmonization_grid());
  c.check_unused();

  HarmonizationData d;
  if (path.empty()) {
    d = gen_harmonization_synthetic(g, data_seed);
  } else {
    d = load_harmonization_directory(path);
    if (!groups_path.empty()) {
      const NumericTable t = read_numeric_table(groups_path);
      for (Index i = 0; i < t.values.rows(); ++i) d.groups.push_back(static_cast<int>(t.values(i, 0)));
      d.validate();
    }
  }
  const ProjectionTable table(d, grid, AdmmOptions{}, eta);
  Rng rng = make_rng(s.seed, 15);
  HarmonizationChain chain = harmonization_sampler(table, o, rng);
  ExperimentResult r;
  r.trace = std::move(chain.trace);
  const RunStamp stamp{s.seed, c.hash()};
  std::vector<std::string> header;
  for (Index k = 0; k < d.subjects(); ++k) header.push_back("s" + std::to_string(k));
  r.extra_files.emplace_back("smoothed_distance.csv", matrix_csv(chain.smoothed_distance, header, stamp));
  const MatrixXd raw = raw_geodesic_distances(d, eta);
  r.extra_files.emplace_back("raw_distance.csv", matrix_csv(raw, header, stamp));
  r.metrics["subjects"] = d.subjects();
  r.metrics["regions"] = d.laplacians.front().rows();
  if (!d.groups.empty()) {
    const auto [ks_raw, acc_raw] = group_separation(raw, d.groups, s.seed);
    const auto [ks_s, acc_s] = group_separation(chain.smoothed_distance, d.groups, s.seed);
    r.metrics["ks_raw"] = ks_raw;
    r.metrics["ks_smoothed"] = ks_s;
    r.metrics["cluster_accuracy_raw"] = acc_raw;
    r.metrics["cluster_accuracy_smoothed"] = acc_s;
  }
  return r;
}

// ---- flow ---------------------------------------------------------------------

inline ExperimentResult flow(const Config& c) {
  const RunSettings s = settings(c, 10000, 2000);
  FlowGenOptions g;
  g.nodes = static_cast<int>(c.get_count("data.nodes", 40, 3));
  g.uncertain = static_cast<int>(c.get_count("data.uncertain", 5, 1));
  g.replicates = static_cast<int>(c.get_count("data.replicates", 500, 1));
  g.edge_probability = c.get_double("data.edge_probability", g.edge_probability);
  if (!(g.edge_probability > 0.0 && g.edge_probability <= 1.0)) throw c.error("data.edge_probability", "must lie in (0, 1]");
  g.noise_sd = positive(c, "data.noise_sd", 1.0);
  const auto data_seed = static_cast<std::uint64_t>(c.get_count("data.seed", static_cast<long long>(s.seed), 0));
  FlowPriors pr{positive(c, "priors.capacity_rate", 0.2), positive(c, "priors.sigma2_shape", 2.0),
                positive(c, "priors.sigma2_scale", 5.0)};
  c.check_unused();

  const FlowStudy st = gen_flow_network(g, data_seed);
  const FlowModel model(st.data, pr);
  // Start each capacity just above its observed mean flow.
  VectorXd init(g.uncertain + 1);
  for (int k = 0; k < g.uncertain; ++k)
    init(k) = st.data.observations.col(st.data.network.uncertain[static_cast<std::size_t>(k)]).mean() + 1.0;
  init(g.uncertain) = 1.0;
  for (int k = 0; k < g.uncertain; ++k) init(k) = std::max(init(k), 0.1);
  RwOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  Rng rng = make_rng(s.seed, 16);
  ExperimentResult r;
  r.trace = rw_metropolis(model, init, o, rng);
  Json cov = Json::array();
  int inside = 0;
  for (int k = 0; k < g.uncertain; ++k) {
    const auto [lo, hi] = central_interval(r.trace.samples.col(k));
    const double truth = st.true_capacities(k);
    const bool in = lo <= truth && truth <= hi;
    inside += in;
    cov.push_back({{"edge", st.data.network.uncertain[static_cast<std::size_t>(k)]}, {"true", truth}, {"lo", lo}, {"hi", hi}, {"covered", in}});
  }
  r.metrics["edges"] = st.data.network.edges.size();
  r.metrics["generator_attempts"] = st.attempts;
  r.metrics["intervals"] = cov;
  r.metrics["covered"] = inside;
  return r;
}

// ---- Cox ----------------------------------------------------------------------

struct CoxSetup {
  CoxStudy study;
  int intervals = 5;
  double prior_sd = 5.0;
};

inline CoxSetup cox_setup(const Config& c, std::uint64_t seed) {
  CoxGenOptions g;
  g.n = c.get_count("data.n", 500);
  g.lambda0 = c.get_double("data.lambda0", 0.8);
  CoxSetup out;
  out.intervals = static_cast<int>(c.get_count("data.intervals", 5, 1, 1000));
  out.prior_sd = positive(c, "priors.lambda_sd", 5.0);
  const auto data_seed = static_cast<std::uint64_t>(c.get_count("data.seed", static_cast<long long>(seed), 0));
  const std::string path = c.get_string("data.path", "");
  if (path.empty()) {
    out.study = gen_cox_data(g, data_seed);
  } else {
    const NumericTable t = read_numeric_table(path);
    out.study.times = t.values.col(t.column("time"));
    out.study.covariates = t.values.col(t.column("x"));
  }
  return out;
}

inline ExperimentResult cox(const Config& c) {
  const RunSettings s = settings(c, 10000, 2000);
  const CoxSetup setup = cox_setup(c, s.seed);
  c.check_unused();
  CoxDesign design(setup.study.times, setup.study.covariates, CoxDesign::quantile_edges(setup.study.times, setup.intervals));
  const CoxModel model(design, setup.prior_sd);
  RwOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  Rng rng = make_rng(s.seed, 17);
  ExperimentResult r;
  r.trace = rw_metropolis(model, VectorXd::Zero(1), o, rng);
  r.metrics["n"] = design.size();
  return r;
}

inline ExperimentResult cox_canonical(const Config& c) {
  const RunSettings s = settings(c, 10000, 2000);
  const CoxSetup setup = cox_setup(c, s.seed);
  CoxCanonicalOptions o;
  o.iters = s.iters;
  o.burn_in = s.burn_in;
  o.rate_shape = positive(c, "priors.rate_shape", 1.0);
  o.rate_rate = positive(c, "priors.rate_rate", 1.0);
  o.prior_sd = setup.prior_sd;
  c.check_unused();
  CoxDesign design(setup.study.times, setup.study.covariates, CoxDesign::quantile_edges(setup.study.times, setup.intervals));
  Rng rng = make_rng(s.seed, 18);
  ExperimentResult r;
  r.trace = cox_canonical_sampler(design, o, rng);
  r.metrics["n"] = design.size();
  return r;
}

}  // namespace experiments

using ExperimentFn = std::function<ExperimentResult(const Config&)>;

inline const std::map<std::string, ExperimentFn>& experiment_registry() {
  static const std::map<std::string, ExperimentFn> r{
      {"lqe", experiments::lqe},
      {"lqe_pg", experiments::lqe_pg},
      {"bmmc", experiments::bmmc},
      {"gibbs_hinge", experiments::gibbs_hinge},
      {"harmonization", experiments::harmonization},
      {"flow", experiments::flow},
      {"cox", experiments::cox},
      {"cox_canonical", experiments::cox_canonical},
  };
  return r;
}

inline std::string experiment_names() {
  std::string s;
  for (const auto& [k, v] : experiment_registry()) s += (s.empty() ? "" : ", ") + k;
  return s;
}

struct RunOutcome {
  std::filesystem::path directory;
  ExperimentResult result;
  RunSettings settings;
};

/// Runs the configured experiment and writes samples.csv, summary.json,
/// manifest.json, timing.json and any extra files. The output directory is
/// `out` if given, else [experiment] output, else <root>/<name>-<hash>.
inline RunOutcome run_experiment(const Config& cfg, const std::optional<std::filesystem::path>& out = std::nullopt) {
  const std::string name = cfg.get_string("experiment.name");
  const auto& reg = experiment_registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw cfg.error("experiment.name", "unknown experiment '" + name + "'; valid names: " + experiment_names());

  RunOutcome o;
  o.result = it->second(cfg);
  o.settings = experiments::settings(cfg, 1, 0);
  const RunStamp stamp{o.settings.seed, cfg.hash()};
  const std::string configured = cfg.get_string("experiment.output", "");
  o.directory = out ? *out : (!configured.empty() ? std::filesystem::path(configured) : default_output_root() / (name + "-" + stamp.config_hash));
  std::filesystem::create_directories(o.directory);

  std::vector<std::string> files{"samples.csv", "summary.json", "timing.json"};
  write_text(o.directory / "samples.csv", samples_csv(o.result.trace, stamp));
  Json summary = summary_json(o.result.trace, stamp);
  summary["experiment"] = name;
  summary["metrics"] = o.result.metrics;
  write_text(o.directory / "summary.json", dump(summary));
  write_text(o.directory / "timing.json", dump(timing_json(o.result.trace)));
  for (const auto& [file, body] : o.result.extra_files) {
    write_text(o.directory / file, body);
    files.push_back(file);
  }
  files.push_back("manifest.json");
  write_text(o.directory / "manifest.json", dump(manifest_json(cfg, name, stamp, files)));
  return o;
}

}  // namespace bridged
