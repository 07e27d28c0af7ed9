#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bridged/experiments/oracle_suite.hpp"
#include "bridged/experiments/runner.hpp"

using namespace bridged;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;  // stdout and stderr together
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(BRIDGED_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (const std::size_t k = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / ("bridged_cli_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }

 private:
  fs::path path_;
};

const char* kSmallLqe =
    "[experiment]\n"
    "name = lqe\n"
    "seed = 5\n"
    "iters = 600\n"
    "burn_in = 100\n"
    "\n"
    "[data]\n"
    "n = 60\n";

}  // namespace

// ---- config ---------------------------------------------------------------------

TEST(Config, HashIsFnv1aOfTheRawText) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  const Config a = Config::parse(kSmallLqe), b = Config::parse(kSmallLqe);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), Config::parse(std::string(kSmallLqe) + "; comment\n").hash());
}

TEST(Config, TypedAccessAndFallbacks) {
  const Config c = Config::parse("[a]\nx = 3\ny = 0.25\nz = true\nw = 1, 2.5 ,4\n");
  EXPECT_EQ(c.get_int("a.x"), 3);
  EXPECT_EQ(c.get_double("a.y"), 0.25);
  EXPECT_TRUE(c.get_bool("a.z", false));
  EXPECT_EQ(c.get_doubles("a.w", {}), (std::vector<double>{1.0, 2.5, 4.0}));
  EXPECT_EQ(c.get_int("a.missing", 7), 7);
  EXPECT_NO_THROW(c.check_unused());
  EXPECT_THROW(c.get_string("b.q"), ConfigError);
}

TEST(Config, ErrorsCarryLineAndField) {
  try {
    Config::parse("[experiment]\nname = lqe\nthis line is broken\n", "bad.ini");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ini:3"), std::string::npos) << e.what();
  }
  const Config c = Config::parse("[experiment]\nname = lqe\niters = many\n", "cfg.ini");
  try {
    c.get_int("experiment.iters", 10);
    FAIL() << "expected a field error";
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("cfg.ini:3"), std::string::npos) << m;
    EXPECT_NE(m.find("experiment.iters"), std::string::npos) << m;
  }
  const Config u = Config::parse("[experiment]\nname = lqe\n[data]\nn = 5\nnn = 6\n", "u.ini");
  u.get_string("experiment.name");
  u.get_int("data.n");
  try {
    u.check_unused();
    FAIL() << "expected an unknown-field error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("u.ini:5: field 'data.nn'"), std::string::npos) << e.what();
  }
}

TEST(Config, CountBounds) {
  const Config c = Config::parse("[data]\nn = 0\n");
  EXPECT_THROW(c.get_count("data.n", 5), ConfigError);
  EXPECT_EQ(c.get_count("data.n", 5, 0), 0);
}

// ---- generators ---------------------------------------------------------------

TEST(Generators, LqeDataNearZeroFollowsSigmoidOfOne) {
  const LqeData d = gen_lqe_data(100000, 9);
  double hits = 0.0, count = 0.0;
  for (Index i = 0; i < d.y.size(); ++i) {
    EXPECT_GT(d.x(i, 0), -6.0);
    EXPECT_LT(d.x(i, 0), 6.0);
    if (std::abs(d.x(i, 0)) < 0.1) {
      hits += d.y(i);
      ++count;
    }
  }
  // σ(cos x) for |x| < 0.1 averages 0.7306; ~830 points give SE ≈ 0.016.
  EXPECT_NEAR(hits / count, 1.0 / (1.0 + std::exp(-1.0)), 0.05);
  EXPECT_THROW(gen_lqe_data(0, 1), InvalidInput);
}

TEST(Generators, LqeDataIsReproducible) {
  const LqeData a = gen_lqe_data(50, 3), b = gen_lqe_data(50, 3), c = gen_lqe_data(50, 4);
  EXPECT_TRUE((a.x.array() == b.x.array()).all());
  EXPECT_TRUE((a.y.array() == b.y.array()).all());
  EXPECT_FALSE((a.x.array() == c.x.array()).all());
}

TEST(Generators, CoxFlatHazardGivesUnitExponential) {
  CoxGenOptions o;
  o.n = 10000;
  o.lambda0 = 0.0;
  o.edges = {0.0};
  o.rates = {1.0};
  const CoxStudy s = gen_cox_data(o, 11);
  std::vector<double> t(s.times.data(), s.times.data() + s.times.size());
  std::sort(t.begin(), t.end());
  double ks = 0.0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double f = 1.0 - std::exp(-t[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LE(ks, 0.02);
}

TEST(Generators, CoxDoublingHazardHalvesTimes) {
  // Constant baseline, where doubling the hazard rescales every time.
  CoxGenOptions a, b;
  a.edges = b.edges = {0.0};
  a.rates = {0.7};
  b.rates = {1.4};
  const CoxStudy sa = gen_cox_data(a, 12), sb = gen_cox_data(b, 12);
  auto median = [](VectorXd v) {
    std::sort(v.data(), v.data() + v.size());
    return 0.5 * (v(v.size() / 2 - 1) + v(v.size() / 2));
  };
  EXPECT_NEAR(median(sb.times), 0.5 * median(sa.times), 1e-12 * median(sa.times));
  const CoxStudy again = gen_cox_data(a, 12);
  EXPECT_TRUE((again.times.array() == sa.times.array()).all());
}

TEST(Generators, FlowNetworkConservationAndReplicateMeans) {
  const FlowStudy st = gen_flow_network(FlowGenOptions{}, 21);
  const auto& net = st.data.network;
  EXPECT_EQ(net.nodes, 40);
  EXPECT_EQ(net.uncertain.size(), 5u);
  EXPECT_GT(st.true_flows.maxCoeff(), 0.0);
  // Real-valued capacities: flows are sums of pushes, so allow rounding.
  VectorXd balance = VectorXd::Zero(net.nodes);
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const double f = st.true_flows(static_cast<Index>(k));
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, net.edges[k].capacity * (1.0 + 1e-12));
    balance(net.edges[k].from) -= f;
    balance(net.edges[k].to) += f;
  }
  for (int v = 0; v < net.nodes; ++v) {
    if (v != net.source && v != net.sink) EXPECT_NEAR(balance(v), 0.0, 1e-12) << "node " << v;
  }
  for (std::size_t k = 0; k < net.uncertain.size(); ++k)
    EXPECT_EQ(st.true_capacities(static_cast<Index>(k)), net.edges[static_cast<std::size_t>(net.uncertain[k])].capacity);

  // CLT: per-edge replicate means within 3σ/√n. With several hundred edges a
  // few exceed that by chance, so count them against a binomial bound.
  const double se = 1.0 / std::sqrt(500.0);
  int beyond = 0;
  double worst = 0.0;
  for (Index k = 0; k < st.data.observations.cols(); ++k) {
    const double z = std::abs(st.data.observations.col(k).mean() - st.true_flows(k)) / se;
    beyond += z > 3.0;
    worst = std::max(worst, z);
  }
  EXPECT_LE(beyond, std::max(3, static_cast<int>(0.01 * static_cast<double>(st.data.observations.cols()))));
  EXPECT_LT(worst, 5.0);

  const FlowStudy again = gen_flow_network(FlowGenOptions{}, 21);
  ASSERT_EQ(again.data.network.edges.size(), net.edges.size());
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    EXPECT_EQ(again.data.network.edges[k].from, net.edges[k].from);
    EXPECT_EQ(again.data.network.edges[k].to, net.edges[k].to);
    EXPECT_EQ(again.data.network.edges[k].capacity, net.edges[k].capacity);
  }
}

TEST(Generators, HarmonizationLaplaciansAndPlantedStructure) {
  const HarmonizationData d = gen_harmonization_synthetic(HarmonizationGenOptions{}, 31);
  ASSERT_EQ(d.subjects(), 20);
  for (const MatrixXd& l : d.laplacians) {
    EXPECT_TRUE(is_graph_laplacian(l, 1e-12));
    EXPECT_EQ((l - l.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
  for (int k : {1, 2, 3, 4})
    EXPECT_EQ(community_count(laplacian_from_adjacency(planted_adjacency(24, k))), k);

  double within = 0.0, between = 0.0;
  int nw = 0, nb = 0;
  for (Index a = 0; a < d.subjects(); ++a)
    for (Index b = 0; b < a; ++b) {
      const double g = geodesic_distance(d.laplacians[static_cast<std::size_t>(a)], d.laplacians[static_cast<std::size_t>(b)]);
      if (d.groups[static_cast<std::size_t>(a)] == d.groups[static_cast<std::size_t>(b)]) within += g, ++nw;
      else between += g, ++nb;
    }
  EXPECT_LT(within / nw, between / nb);
  EXPECT_THROW(gen_harmonization_synthetic(HarmonizationGenOptions{1}, 1), InvalidInput);
}

TEST(Generators, MaskBySexAndToyClassifier) {
  VectorXd sex(30);
  for (Index i = 0; i < 30; ++i) sex(i) = i % 3 == 0 ? 0.0 : 1.0;
  const auto m = mask_by_sex(sex, 6, 4, 7);
  ASSERT_EQ(m.size(), 10u);
  EXPECT_TRUE(std::is_sorted(m.begin(), m.end()));
  int men = 0;
  for (Index i : m) men += sex(i) == 1.0;
  EXPECT_EQ(men, 6);
  EXPECT_EQ(m, mask_by_sex(sex, 6, 4, 7));
  EXPECT_THROW(mask_by_sex(sex, 25, 0, 1), InvalidInput);

  const BmmcData d = gen_bmmc_toy(30, 6, 2);
  EXPECT_EQ(d.y.size(), 36);
  EXPECT_EQ(d.unlabeled.size(), 6u);
  EXPECT_NO_THROW(d.validate());
}

// ---- factored LQE kernel ---------------------------------------------------------

TEST(LqeFactoredKernel, MatchesDenseSolve) {
  const LqeData d = gen_lqe_data(300, 41);
  LqeOptions dense;
  dense.factor_kernel = false;
  const LqeModel a(d), b(d, {}, dense);
  for (double tau : {0.3, 1.0, 3.0})
    for (double bw : {0.5, 2.0, 8.0}) {
      VectorXd lam(2);
      lam << tau, bw;
      const LqeSolution sa = a.solve(lam, nullptr), sb = b.solve(lam, nullptr);
      EXPECT_LE((sa.z - sb.z).lpNorm<Eigen::Infinity>(), 1e-6) << tau << " " << bw;
      EXPECT_NEAR(sa.objective, sb.objective, 1e-6 * (1.0 + std::abs(sb.objective)));
    }
}

// ---- in-process runner -------------------------------------------------------------

TEST(Runner, WritesStampedOutputs) {
  TempDir tmp;
  const Config cfg = Config::parse(kSmallLqe, "small.ini");
  const RunOutcome r = run_experiment(cfg, tmp.path() / "out");
  EXPECT_EQ(r.result.trace.kept(), 500);
  const std::string stamp = "# seed=5 config_hash=" + cfg.hash() + "\n";
  EXPECT_EQ(slurp(tmp.path() / "out" / "samples.csv").rfind(stamp, 0), 0u);
  const Json summary = Json::parse(slurp(tmp.path() / "out" / "summary.json"));
  EXPECT_EQ(summary["config_hash"], cfg.hash());
  EXPECT_EQ(summary["seed"], 5);
  const Json manifest = Json::parse(slurp(tmp.path() / "out" / "manifest.json"));
  EXPECT_EQ(manifest["config"], kSmallLqe);
  EXPECT_EQ(manifest["code_version"], kCodeVersion);
  EXPECT_TRUE(manifest["decisions"].contains("geodesic_eta"));
}

TEST(Runner, UnknownExperimentListsNames) {
  const Config cfg = Config::parse("[experiment]\nname = nope\n", "x.ini");
  try {
    run_experiment(cfg, fs::temp_directory_path() / "bridged_never_written");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    for (const auto& [name, fn] : experiment_registry()) EXPECT_NE(m.find(name), std::string::npos) << name;
  }
}

TEST(Runner, OracleSuitePassesAndDetectsInjectedFault) {
  for (const OracleCheck& c : run_oracle_suite()) EXPECT_TRUE(c.pass) << c.name << " " << c.observed;
  OracleFaults f;
  f.dual_sign = true;
  bool constancy_failed = false;
  for (const OracleCheck& c : run_oracle_suite(f))
    if (c.name == "lqe_primal_dual_constancy") constancy_failed = !c.pass;
  EXPECT_TRUE(constancy_failed);
}

// ---- command line --------------------------------------------------------------------

TEST(Cli, RerunIsByteIdentical) {
  TempDir tmp;
  const fs::path cfg = tmp.write("lqe.ini", kSmallLqe);
  ASSERT_EQ(cli("run " + cfg.string() + " --out " + (tmp.path() / "a").string()).code, 0);
  ASSERT_EQ(cli("run " + cfg.string() + " --out " + (tmp.path() / "b").string()).code, 0);
  for (const char* f : {"samples.csv", "summary.json", "manifest.json"}) {
    const std::string a = slurp(tmp.path() / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(tmp.path() / "b" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(tmp.path() / "a" / "timing.json"));
}

TEST(Cli, DefaultOutputDirectoryFromEnvironment) {
  TempDir tmp;
  const fs::path cfg = tmp.write("lqe.ini", kSmallLqe);
  const std::string env = std::string(kOutputDirEnv) + "=" + (tmp.path() / "root").string() + " ";
  const std::string cmd = env + BRIDGED_CLI_PATH + " run " + cfg.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const fs::path dir = tmp.path() / "root" / ("lqe-" + Config::parse(kSmallLqe).hash());
  EXPECT_TRUE(fs::exists(dir / "samples.csv")) << dir;
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("run " + (tmp.path() / "missing.ini").string()).code, 2);

  const Result unknown = cli("run " + tmp.write("u.ini", "[experiment]\nname = nope\n").string());
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.out.find("lqe_pg"), std::string::npos) << unknown.out;

  const Result malformed = cli("run " + tmp.write("m.ini", "[experiment]\nname = lqe\n[data\nn = 3\n").string());
  EXPECT_EQ(malformed.code, 2);
  EXPECT_NE(malformed.out.find("m.ini:3"), std::string::npos) << malformed.out;

  const Result field = cli("run " + tmp.write("f.ini", "[experiment]\nname = lqe\niters = 10\nburn_in = 20\n").string());
  EXPECT_EQ(field.code, 2);
  EXPECT_NE(field.out.find("f.ini:4"), std::string::npos) << field.out;

  const Result typo = cli("run " + tmp.write("t.ini", "[experiment]\nname = lqe\n[data]\nnn = 50\n").string());
  EXPECT_EQ(typo.code, 2);
  EXPECT_NE(typo.out.find("data.nn"), std::string::npos) << typo.out;

  const std::string missing_data = "[experiment]\nname = lqe\n[data]\npath = " + (tmp.path() / "nope.csv").string() + "\n";
  const Result nofile = cli("run " + tmp.write("d.ini", missing_data).string());
  EXPECT_EQ(nofile.code, 2);
  EXPECT_NE(nofile.out.find("file error"), std::string::npos) << nofile.out;
}

TEST(Cli, LoadersRejectRaggedAndNonBinaryTables) {
  TempDir tmp;
  const fs::path ragged = tmp.write("r.csv", "x,y\n0.1,1\n0.2\n");
  const Result r = cli("run " + tmp.write("r.ini", "[experiment]\nname = lqe\n[data]\npath = " + ragged.string() + "\n").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;

  const fs::path labels = tmp.write("l.csv", "x,y\n0.1,1\n0.2,2\n");
  const Result l = cli("run " + tmp.write("l.ini", "[experiment]\nname = lqe\n[data]\npath = " + labels.string() + "\n").string());
  EXPECT_EQ(l.code, 2);
  EXPECT_NE(l.out.find("0 or 1"), std::string::npos) << l.out;
}

TEST(Cli, OracleSuiteAndInjectedFault) {
  const Result ok = cli("oracle-suite");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("tolerance="), std::string::npos);
  const Result bad = cli("oracle-suite --inject-fault dual-sign");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL lqe_primal_dual_constancy"), std::string::npos) << bad.out;
  EXPECT_EQ(cli("oracle-suite --inject-fault other").code, 2);
}

TEST(Cli, GenIsReproducibleAndFeedsRun) {
  TempDir tmp;
  const fs::path a = tmp.path() / "a.csv", b = tmp.path() / "b.csv", c = tmp.path() / "c.csv";
  ASSERT_EQ(cli("gen lqe --n 80 --seed 4 --out " + a.string()).code, 0);
  ASSERT_EQ(cli("gen lqe --n 80 --seed 4 --out " + b.string()).code, 0);
  ASSERT_EQ(cli("gen lqe --n 80 --seed 5 --out " + c.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
  EXPECT_EQ(slurp(a).rfind("# seed=4 config_hash=", 0), 0u);

  const std::string cfg = "[experiment]\nname = lqe\niters = 300\nburn_in = 50\n[data]\npath = " + a.string() + "\n";
  const Result run = cli("run " + tmp.write("g.ini", cfg).string() + " --out " + (tmp.path() / "run").string());
  EXPECT_EQ(run.code, 0) << run.out;
  const Json s = Json::parse(slurp(tmp.path() / "run" / "summary.json"));
  EXPECT_EQ(s["metrics"]["n"], 80);

  for (const char* g : {"cox", "bmmc"}) EXPECT_EQ(cli(std::string("gen ") + g + " --n 40 --out " + (tmp.path() / g).string()).code, 0) << g;
  EXPECT_EQ(cli("gen flow --n 12 --out " + (tmp.path() / "flow").string()).code, 0);
  EXPECT_TRUE(fs::exists(tmp.path() / "flow" / "edges.csv"));
  EXPECT_EQ(cli("gen unicorn").code, 2);
}

TEST(Cli, HarmonizationDirectoryRoundTrip) {
  TempDir tmp;
  const fs::path dir = tmp.path() / "h";
  ASSERT_EQ(cli("gen harmonization --n 6 --seed 2 --out " + dir.string()).code, 0);
  const std::string cfg = "[experiment]\nname = harmonization\niters = 200\nburn_in = 50\n[data]\npath = " +
                          (dir / "laplacians").string() + "\ngroups = " + (dir / "groups.csv").string() + "\n";
  const Result r = cli("run " + tmp.write("h.ini", cfg).string() + " --out " + (tmp.path() / "run").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const Json s = Json::parse(slurp(tmp.path() / "run" / "summary.json"));
  EXPECT_EQ(s["metrics"]["subjects"], 6);
  EXPECT_TRUE(s["metrics"].contains("ks_smoothed"));
  const MatrixXd dist = read_square_matrix(tmp.path() / "run" / "smoothed_distance.csv");
  EXPECT_EQ(dist.rows(), 6);
  EXPECT_EQ(dist.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cli, DiagSummarizesATrace) {
  TempDir tmp;
  const fs::path cfg = tmp.write("lqe.ini", kSmallLqe);
  ASSERT_EQ(cli("run " + cfg.string() + " --out " + (tmp.path() / "o").string()).code, 0);
  const Result d = cli("diag " + (tmp.path() / "o" / "samples.csv").string() + " --burn-in 10");
  ASSERT_EQ(d.code, 0) << d.out;
  const Json j = Json::parse(d.out);
  EXPECT_EQ(j["rows"], 490);
  EXPECT_EQ(j["columns"][0]["name"], "tau");
  EXPECT_EQ(j["columns"][1]["name"], "b");
  EXPECT_EQ(cli("diag " + (tmp.path() / "nothing.csv").string()).code, 2);
}
