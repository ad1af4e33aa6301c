#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smoothtie/construction.hpp"
#include "smoothtie/monte_carlo.hpp"
#include "smoothtie/regime.hpp"
#include "smoothtie/suites.hpp"

using namespace smoothtie;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kUndecided = 3, kResourceCap = 4 };

struct RunConfig {
  std::string rule;
  int m = 3;
  int k = 2;
  std::vector<std::int64_t> n;
  std::string model = "ic";
  std::string adversary = "max";
  std::string method = "generic";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  std::uint64_t cap = kDefaultHistogramCap;
  std::size_t node_cap = kDefaultNodeCap;
  int grid = 4;
  std::string input;
  std::string plot;
  bool compare = false;
  std::string target;
  std::string format = "text";
  std::string suite;
  std::string event_out;
  std::string polyhedron;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw std::invalid_argument("cannot write " + cfg.out);
  f << text;
}

std::int64_t single_n(const RunConfig& cfg) {
  if (cfg.n.size() != 1) throw std::invalid_argument("this subcommand takes exactly one --n");
  return cfg.n.front();
}

ModelSpec load_model(const RunConfig& cfg) {
  if (cfg.model == "ic") return impartial_culture(cfg.m);
  return model_from_json(json::parse(read_file(cfg.model)));
}

/// The one distribution used by simulate and exact; zero entries are allowed here.
RationalVector load_distribution(const RunConfig& cfg) {
  const auto q = static_cast<std::size_t>(factorial(cfg.m));
  if (cfg.model == "ic") return RationalVector(q, ratio(1, static_cast<long>(q)));
  const auto j = json::parse(read_file(cfg.model));
  if (!j.is_array() || j.size() != 1)
    throw std::invalid_argument("simulate and exact need a model file holding exactly one distribution");
  RationalVector v;
  for (const auto& x : j.front()) v.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>()));
  if (v.size() != q) throw std::invalid_argument("distribution length must be m! = " + std::to_string(q));
  return v;
}

void check_k(const RunConfig& cfg) {
  if (cfg.k < 1 || cfg.k > cfg.m) throw std::invalid_argument("k must lie in 1..m");
}

int cmd_classify_polyhedron(const RunConfig& cfg) {
  if (cfg.model == "ic") throw std::invalid_argument("--polyhedron needs --model <file>");
  ClassifyOptions opt;
  opt.node_cap = cfg.node_cap;
  const auto h = polyhedron_from_json(json::parse(read_file(cfg.polyhedron)));
  const auto r = classify_polyhedron(load_model(cfg), h, single_n(cfg), parse_adversary(cfg.adversary), opt);
  auto out = regime_to_json(r);
  emit(cfg, out.dump(2) + "\n");
  return r.kind == RegimeKind::Undecided ? kUndecided : kOk;
}

int cmd_classify(const RunConfig& cfg) {
  if (!cfg.polyhedron.empty()) return cmd_classify_polyhedron(cfg);
  if (cfg.rule.empty()) throw std::invalid_argument("classify needs --rule or --polyhedron");
  check_k(cfg);
  const auto rule = parse_rule(cfg.rule);
  const auto n = single_n(cfg);
  const auto adv = parse_adversary(cfg.adversary);
  json out;
  bool undecided = false;
  auto generic = [&] {
    ClassifyOptions opt;
    opt.node_cap = cfg.node_cap;
    opt.grid = cfg.grid;
    auto r = classify_ties(rule, load_model(cfg), cfg.m, cfg.k, n, adv, opt);
    undecided = undecided || r.kind == RegimeKind::Undecided;
    return r;
  };
  auto closed = [&] {
    if (cfg.model != "ic" || adv != Adversary::Max)
      throw std::invalid_argument("closed forms cover the maximizing adversary under the uniform distribution only");
    return closed_form_regime(rule, cfg.m, cfg.k, n);
  };
  if (cfg.method == "generic") {
    out = regime_to_json(generic());
  } else if (cfg.method == "closed-form") {
    out = regime_to_json(closed());
  } else if (cfg.method == "both") {
    const auto g = generic();
    const auto c = closed();
    out = regime_to_json(g);
    out["closed_form"] = regime_to_json(c);
    out["agree"] = g.agrees_with(c);
  } else {
    throw std::invalid_argument("--method must be generic, closed-form or both");
  }
  if (!cfg.event_out.empty()) {
    if (!tie_event_supported(rule, cfg.m)) throw std::invalid_argument("no tie polyhedra for this rule at this m");
    std::ofstream f(cfg.event_out);
    if (!f) throw std::invalid_argument("cannot write " + cfg.event_out);
    f << tie_event_to_json(tie_event(rule, cfg.m, cfg.k, n)).dump() << "\n";
  }
  out["input"] = {{"rule", rule.id}, {"m", cfg.m}, {"k", cfg.k}, {"n", n}, {"model", cfg.model},
                  {"adversary", cfg.adversary}};
  emit(cfg, out.dump(2) + "\n");
  return undecided ? kUndecided : kOk;
}

const char* kCsvHeader = "rule,m,k,n,trials,hits,p_hat,wilson_lo,wilson_hi,seed";

std::vector<SampleEstimate> run_sweep(const RunConfig& cfg) {
  check_k(cfg);
  if (cfg.n.empty()) throw std::invalid_argument("--n is required");
  if (cfg.trials == 0) throw std::invalid_argument("--trials must be positive");
  const auto rule = parse_rule(cfg.rule);
  const auto pi = load_distribution(cfg);
  SimulationConfig sc;
  sc.trials = cfg.trials;
  sc.seed = cfg.seed;
  sc.workers = cfg.workers;
  std::vector<SampleEstimate> out;
  for (auto n : cfg.n) out.push_back(estimate_tie_probability(rule, pi, cfg.m, cfg.k, n, sc));
  return out;
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

int cmd_simulate(const RunConfig& cfg) {
  const auto est = run_sweep(cfg);
  std::string csv = std::string(kCsvHeader) + "\n";
  std::string id = parse_rule(cfg.rule).id;
  if (id.find(',') != std::string::npos) id = '"' + id + '"';
  for (const auto& e : est)
    csv += id + "," + std::to_string(cfg.m) + "," + std::to_string(cfg.k) + "," +
           std::to_string(e.n) + "," + std::to_string(e.trials) + "," + std::to_string(e.hits) + "," +
           format_double(e.p_hat) + "," + format_double(e.lo) + "," + format_double(e.hi) + "," +
           std::to_string(e.seed) + "\n";
  emit(cfg, csv);
  return kOk;
}

int cmd_exact(const RunConfig& cfg) {
  check_k(cfg);
  const auto p = exact_tie_probability(parse_rule(cfg.rule), load_distribution(cfg), cfg.m, cfg.k, single_n(cfg), cfg.cap);
  emit(cfg, to_string(p) + "\n");
  return kOk;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) out.emplace_back();
    else out.back() += c;
  }
  return out;
}

/// Reads estimates written by `simulate`; fills rule, m and k from the rows when they were not given.
std::vector<SampleEstimate> read_estimates(RunConfig& cfg) {
  std::stringstream ss(read_file(cfg.input));
  std::string line;
  if (!std::getline(ss, line) || line != kCsvHeader) throw std::invalid_argument("input is not a simulate CSV");
  std::vector<SampleEstimate> out;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 10) throw std::invalid_argument("malformed CSV row: " + line);
    if (cfg.rule.empty()) cfg.rule = c[0];
    cfg.m = std::stoi(c[1]);
    cfg.k = std::stoi(c[2]);
    SampleEstimate e;
    e.n = std::stoll(c[3]);
    e.trials = std::stoull(c[4]);
    e.hits = std::stoull(c[5]);
    e.p_hat = std::stod(c[6]);
    e.lo = std::stod(c[7]);
    e.hi = std::stod(c[8]);
    e.seed = std::stoull(c[9]);
    out.push_back(e);
  }
  return out;
}

int cmd_fit(RunConfig cfg) {
  const auto est = cfg.input.empty() ? run_sweep(cfg) : read_estimates(cfg);
  const auto fit = fit_exponent(est);
  json out;
  out["slope"] = fit.slope;
  out["intercept"] = fit.intercept;
  out["stderr"] = fit.stderr_slope;
  out["points"] = json::array();
  for (const auto& p : fit.points) out["points"].push_back({{"n", p.n}, {"p", p.p}});
  out["discarded"] = json::array();
  for (const auto& e : est)
    if (!(e.lo > 0)) out["discarded"].push_back(e.n);
  if (cfg.compare) {
    if (cfg.rule.empty()) throw std::invalid_argument("--compare-classifier needs a rule");
    const auto n = est.back().n;
    const auto r = classify_ties(parse_rule(cfg.rule), impartial_culture(cfg.m), cfg.m, cfg.k, n, Adversary::Max);
    json cmp = {{"regime", to_string(r.kind)}, {"n", n}};
    std::string predicted = to_string(r.kind);
    if (r.exponent) {
      cmp["predicted_exponent"] = to_string(*r.exponent);
      cmp["difference"] = fit.slope - r.exponent->get_d();
      predicted = to_string(*r.exponent);
    } else if (r.interval) {
      cmp["predicted_interval"] = {to_string(r.interval->first), to_string(r.interval->second)};
      predicted = "[" + to_string(r.interval->first) + ", " + to_string(r.interval->second) + "]";
    }
    out["comparison"] = cmp;
    std::cerr << "predicted exponent " << predicted << " vs fitted " << format_double(fit.slope) << " +- "
              << format_double(fit.stderr_slope) << "\n";
  }
  if (!cfg.plot.empty()) {
    std::ofstream dat(cfg.plot + ".dat");
    for (const auto& p : fit.points) dat << p.n << " " << p.p << "\n";
    std::ofstream gp(cfg.plot + ".gp");
    gp << "set logscale xy\nset xlabel 'n'\nset ylabel 'Pr(k-way tie)'\n"
       << "f(x) = exp(" << fit.intercept << ") * x**(" << fit.slope << ")\n"
       << "plot '" << cfg.plot << ".dat' using 1:2 with points title 'estimate', f(x) title 'fit'\n";
  }
  emit(cfg, out.dump(2) + "\n");
  return kOk;
}

int cmd_construct(const std::string& mode, const RunConfig& cfg) {
  const auto n = single_n(cfg);
  Profile p(cfg.m);
  if (mode == "eo") {
    if (cfg.target.empty()) throw std::invalid_argument("construct eo needs --target");
    const auto target = parse_order(cfg.target, cfg.m);
    p = mcgarvey_profile(target, n);
    if (!(edge_order(histogram(p)) == target)) throw std::logic_error("constructed profile does not realize the target");
  } else if (mode == "put") {
    if (cfg.rule != "stv") throw std::invalid_argument("construct put supports --rule stv only");
    PUTStructure target;
    if (cfg.target.empty()) {
      std::mt19937_64 gen(cfg.seed);
      target = random_almost_linear(cfg.m, gen);
    } else {
      target = parse_put(cfg.target, cfg.m);
    }
    p = stv_put_profile(target, n);
    if (!(put_structure(p, make_mrse(MRSEKind::STV, cfg.m)) == target))
      throw std::logic_error("constructed profile does not realize the target");
    std::cerr << "target " << format_put(target) << "\n";
  } else {
    throw std::invalid_argument("construct mode must be eo or put");
  }
  if (cfg.format == "json") emit(cfg, histogram_to_json(histogram(p)).dump() + "\n");
  else if (cfg.format == "text") emit(cfg, format_profile(p));
  else throw std::invalid_argument("--format must be text or json");
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  bool ok = true;
  std::string report;
  for (const auto& c : run_suite(cfg.suite)) {
    ok = ok && c.passed;
    report += std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
  }
  emit(cfg, report);
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed likelihood of k-way ties"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string construct_mode;

  auto add_problem = [&](CLI::App* sub, bool many_n) {
    auto* rule = sub->add_option("--rule", cfg.rule, "rule id, e.g. borda, copeland:1/2, stv");
    if (many_n || sub->get_name() != "classify") rule->required();
    sub->add_option("--m", cfg.m, "number of alternatives")->check(CLI::Range(2, 30));
    sub->add_option("--k", cfg.k, "number of co-winners");
    auto* n = sub->add_option("--n", cfg.n, many_n ? "numbers of agents (comma separated)" : "number of agents");
    n->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--model", cfg.model, "'ic' or a JSON file of rational distributions");
  };

  auto* classify = app.add_subcommand("classify", "classify the tie regime");
  add_problem(classify, false);
  classify->add_option("--adversary", cfg.adversary, "max or min");
  classify->add_option("--method", cfg.method, "generic, closed-form or both");
  classify->add_option("--node-cap", cfg.node_cap, "branch and bound node cap");
  classify->add_option("--grid", cfg.grid, "mixture grid resolution for the minimizing adversary");
  classify->add_option("--polyhedron", cfg.polyhedron, "classify a single polyhedron JSON file instead of a rule");
  classify->add_option("--event-out", cfg.event_out, "write the tie event's polyhedra as JSON");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates as CSV");
  add_problem(simulate, true);

  auto* exact = app.add_subcommand("exact", "exact probability by histogram enumeration");
  add_problem(exact, false);
  exact->add_option("--cap", cfg.cap, "maximum number of histograms");

  auto* fit = app.add_subcommand("fit", "log-log exponent fit");
  fit->add_option("--rule", cfg.rule, "rule id");
  fit->add_option("--m", cfg.m, "number of alternatives");
  fit->add_option("--k", cfg.k, "number of co-winners");
  fit->add_option("--n", cfg.n, "numbers of agents")->delimiter(',')->check(CLI::PositiveNumber);
  fit->add_option("--model", cfg.model, "'ic' or a JSON file holding one distribution");
  fit->add_option("--input", cfg.input, "CSV written by simulate");
  fit->add_option("--plot", cfg.plot, "write <prefix>.dat and <prefix>.gp");
  fit->add_flag("--compare-classifier", cfg.compare, "report the classifier's predicted exponent");

  for (auto* sub : {simulate, fit}) {
    sub->add_option("--trials", cfg.trials, "trials per n");
    sub->add_option("--seed", cfg.seed, "seed");
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::Range(1u, 256u));
  }

  auto* construct = app.add_subcommand("construct", "build a profile realizing a target structure");
  construct->add_option("mode", construct_mode, "eo or put")->required();
  construct->add_option("--target", cfg.target, "palindromic order or PUT structure");
  construct->add_option("--rule", cfg.rule, "rule for put mode (stv)");
  construct->add_option("--m", cfg.m, "number of alternatives");
  construct->add_option("--n", cfg.n, "number of agents")->check(CLI::PositiveNumber);
  construct->add_option("--seed", cfg.seed, "seed for a random almost linear target");
  construct->add_option("--format", cfg.format, "text or json");

  auto* verify = app.add_subcommand("verify", "run a check suite");
  verify->add_option("--suite", cfg.suite, "dimensions, table1 or constructions")->required();

  for (auto* sub : {classify, simulate, exact, fit, construct, verify})
    sub->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*classify) return cmd_classify(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*exact) return cmd_exact(cfg);
    if (*fit) return cmd_fit(cfg);
    if (*construct) return cmd_construct(construct_mode, cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const ResourceCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kResourceCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
