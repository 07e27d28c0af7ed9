// bridged: experiment runner and oracle checks.
//
//   bridged run <config> [--out DIR]
//   bridged oracle-suite [--inject-fault dual-sign]
//   bridged gen <lqe|cox|flow|harmonization|bmmc> [--n N] [--seed S] [--out PATH]
//   bridged diag <trace.csv> [--burn-in K]
//
// Exit codes: 0 success, 1 check or runtime failure, 2 usage, config, file or
// data error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "bridged/experiments/oracle_suite.hpp"
#include "bridged/experiments/runner.hpp"

namespace fs = std::filesystem;
using namespace bridged;

namespace {

constexpr int kOk = 0, kFailure = 1, kUsage = 2;

void emit(const std::optional<fs::path>& out, const std::string& body) {
  if (!out) {
    std::cout << body;
    return;
  }
  if (out->has_parent_path()) fs::create_directories(out->parent_path());
  write_text(*out, body);
}

std::string row(std::initializer_list<double> v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + fmt17(x);
  return s + "\n";
}

int cmd_run(const std::string& path, const std::string& out) {
  const Config cfg = Config::load(path);
  const RunOutcome r = run_experiment(cfg, out.empty() ? std::nullopt : std::optional<fs::path>(out));
  std::cout << "wrote " << r.directory.string() << " (" << r.result.trace.kept() << " draws, acceptance "
            << r.result.trace.acceptance << ")\n";
  return kOk;
}

int cmd_oracle(const std::string& fault) {
  OracleFaults f;
  if (fault == "dual-sign") f.dual_sign = true;
  else if (!fault.empty()) throw ConfigError("unknown fault '" + fault + "'; valid: dual-sign");
  int failed = 0;
  for (const OracleCheck& c : run_oracle_suite(f)) {
    std::printf("%s %-34s observed=%.3e tolerance=%.1e (%.2fs)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed,
                c.tolerance, c.seconds);
    failed += !c.pass;
  }
  std::printf("%d check(s) failed\n", failed);
  return failed ? kFailure : kOk;
}

int cmd_gen(const std::string& what, long long n, std::uint64_t seed, const std::string& out_arg) {
  const std::optional<fs::path> out = out_arg.empty() ? std::nullopt : std::optional<fs::path>(out_arg);
  const RunStamp stamp{seed, hex64(fnv1a64("gen " + what + " n=" + std::to_string(n) + " seed=" + std::to_string(seed)))};
  if (what == "lqe") {
    const LqeData d = gen_lqe_data(n < 0 ? 1000 : n, seed);
    std::string s = stamp_line(stamp) + "x,y\n";
    for (Index i = 0; i < d.y.size(); ++i) s += row({d.x(i, 0), d.y(i)});
    emit(out, s);
  } else if (what == "cox") {
    CoxGenOptions o;
    if (n >= 0) o.n = n;
    const CoxStudy d = gen_cox_data(o, seed);
    std::string s = stamp_line(stamp) + "time,x\n";
    for (Index i = 0; i < d.times.size(); ++i) s += row({d.times(i), d.covariates(i)});
    emit(out, s);
  } else if (what == "bmmc") {
    const BmmcData d = gen_bmmc_toy(n < 0 ? 30 : n, 6, seed);
    std::vector<bool> masked(static_cast<std::size_t>(d.y.size()), false);
    for (Index j : d.unlabeled) masked[static_cast<std::size_t>(j)] = true;
    std::string s = stamp_line(stamp) + "x0,x1,y,masked\n";
    for (Index i = 0; i < d.y.size(); ++i) s += row({d.x(i, 0), d.x(i, 1), d.y(i) > 0 ? 1.0 : 0.0, masked[static_cast<std::size_t>(i)] ? 1.0 : 0.0});
    emit(out, s);
  } else if (what == "flow") {
    if (!out) throw ConfigError("gen flow: --out DIR is required");
    FlowGenOptions o;
    if (n >= 0) o.nodes = static_cast<int>(n);
    const FlowStudy st = gen_flow_network(o, seed);
    fs::create_directories(*out);
    const auto& net = st.data.network;
    std::string e = stamp_line(stamp) + "from,to,capacity,uncertain,true_flow\n";
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
      const bool unc = std::find(net.uncertain.begin(), net.uncertain.end(), static_cast<int>(k)) != net.uncertain.end();
      e += row({double(net.edges[k].from), double(net.edges[k].to), net.edges[k].capacity, unc ? 1.0 : 0.0, st.true_flows(static_cast<Index>(k))});
    }
    write_text(*out / "edges.csv", e);
    std::vector<std::string> header;
    for (std::size_t k = 0; k < net.edges.size(); ++k) header.push_back("e" + std::to_string(k));
    write_text(*out / "observations.csv", matrix_csv(st.data.observations, header, stamp));
  } else if (what == "harmonization") {
    if (!out) throw ConfigError("gen harmonization: --out DIR is required");
    HarmonizationGenOptions o;
    if (n >= 0) o.subjects = static_cast<int>(n);
    const HarmonizationData d = gen_harmonization_synthetic(o, seed);
    fs::create_directories(*out / "laplacians");
    std::vector<std::string> header;
    for (Index r = 0; r < d.laplacians.front().rows(); ++r) header.push_back("r" + std::to_string(r));
    std::string g = stamp_line(stamp) + "group\n";
    for (std::size_t s = 0; s < d.laplacians.size(); ++s) {
      char name[32];
      std::snprintf(name, sizeof name, "subject%03zu.csv", s);
      write_text(*out / "laplacians" / name, matrix_csv(d.laplacians[s], header, stamp));
      g += std::to_string(d.groups[s]) + "\n";
    }
    write_text(*out / "groups.csv", g);
  } else {
    throw ConfigError("unknown generator '" + what + "'; valid: bmmc, cox, flow, harmonization, lqe");
  }
  return kOk;
}

int cmd_diag(const std::string& path, long long burn_in) {
  const NumericTable t = read_numeric_table(path);
  if (burn_in < 0 || burn_in >= t.values.rows()) throw ConfigError("diag: --burn-in must lie in [0, rows)");
  Json j;
  j["file"] = path;
  j["rows"] = t.values.rows() - burn_in;
  Json cols = Json::array();
  for (Index c = 0; c < t.values.cols(); ++c) {
    const VectorXd x = t.values.col(c).tail(t.values.rows() - burn_in);
    Json p;
    p["name"] = t.header[static_cast<std::size_t>(c)];
    p["mean"] = x.mean();
    p["sd"] = std::sqrt((x.array() - x.mean()).square().sum() / static_cast<double>(x.size()));
    const bool varies = (x.array() != x(0)).any();
    p["acf1"] = varies && x.size() > 1 ? Json(acf(x, 1)(1)) : Json(nullptr);
    p["ess"] = varies && x.size() >= 100 ? Json(std::min(ess(x), static_cast<double>(x.size()))) : Json(nullptr);
    cols.push_back(p);
  }
  j["columns"] = cols;
  std::cout << dump(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bridged posterior experiments"};
  app.require_subcommand(1);

  std::string config, run_out;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config, "INI config")->required();
  run->add_option("--out", run_out, "output directory (overrides the config)");

  std::string fault;
  auto* oracle = app.add_subcommand("oracle-suite", "closed-form and brute-force checks");
  oracle->add_option("--inject-fault", fault, "deliberately break a check (dual-sign)");

  std::string gen_what, gen_out;
  long long gen_n = -1;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset");
  gen->add_option("generator", gen_what, "lqe, cox, flow, harmonization or bmmc")->required();
  gen->add_option("--n", gen_n, "size: observations, nodes, subjects or labeled points");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output file (directory for flow and harmonization); stdout if omitted");

  std::string trace_path;
  long long burn = 0;
  auto* diag = app.add_subcommand("diag", "summarize a samples table");
  diag->add_option("trace", trace_path, "samples csv")->required();
  diag->add_option("--burn-in", burn, "rows to drop from the front");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config, run_out);
    if (*oracle) return cmd_oracle(fault);
    if (*gen) return cmd_gen(gen_what, gen_n, gen_seed, gen_out);
    if (*diag) return cmd_diag(trace_path, burn);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
