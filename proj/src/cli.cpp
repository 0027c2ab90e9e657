#include "dagbag/cli.hpp"

#include "dagbag/aggregation.hpp"
#include "dagbag/bootstrap.hpp"
#include "dagbag/dataset.hpp"
#include "dagbag/error.hpp"
#include "dagbag/evaluation.hpp"
#include "dagbag/hill_climb.hpp"
#include "dagbag/io.hpp"
#include "dagbag/rng.hpp"
#include "dagbag/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace dagbag::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kPathFlags = {"data",    "out",     "truth",      "blacklist",
                                          "whitelist", "init",  "ensemble",   "learned",
                                          "trace",   "initial", "aggregated", "manifest"};

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string lo_text = text.substr(0, colon);
    const std::string hi_text = text.substr(colon + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument(text);
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument(text);
    if (!(lo <= hi)) throw UsageError("--" + flag + ": lower bound exceeds upper bound");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--" + flag + ": expected LO:HI, got '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("--" + flag + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw UsageError("--" + flag + ": empty list");
  return values;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DAGBAG_SEED")) {
    const std::string text = env;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(text, &used);
      if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
      return v;
    } catch (const std::logic_error&) {
      throw UsageError("DAGBAG_SEED must be an unsigned integer, got '" + text + "'");
    }
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Maps a graph onto the node order of `labels`; its own labels must be a
// subset (edge lists without a header only know the nodes they mention).
Dag align(const LabeledGraph& g, const std::vector<std::string>& labels, const std::string& what) {
  std::map<std::string, NodeId> index;
  for (NodeId i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  std::vector<NodeId> to(g.labels.size());
  for (NodeId i = 0; i < g.labels.size(); ++i) {
    const auto it = index.find(g.labels[i]);
    if (it == index.end()) throw Error(what + ": unknown node '" + g.labels[i] + "'");
    to[i] = it->second;
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.graph.edges()) edges.push_back({to[e.source], to[e.target]});
  return Dag::from_edges(labels.size(), edges);
}

std::ofstream open_file(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

Dataset load_dataset(const std::string& path) {
  DataTable t = read_data_file(path);
  try {
    return Dataset::from_raw(std::move(t.values), std::move(t.names));
  } catch (const ConstantColumn& err) {
    throw Error(path + ": " + err.what());
  }
}

// Records the resolved value of every flag plus the seed, so the manifest
// alone reproduces the run.
Manifest start_manifest(const CLI::App& sub, std::optional<std::uint64_t> seed) {
  Manifest m;
  m.add("subcommand", sub.get_name());
  m.add("version", kVersion);
  if (seed) m.add("seed", std::to_string(*seed));
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "seed") continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->as<std::string>();
    } else if (!opt->get_default_str().empty()) {
      value = opt->get_default_str();
    } else {
      continue;
    }
    if (kPathFlags.contains(name)) value = fs::absolute(value).lexically_normal().string();
    m.add("flag." + name, value);
  }
  if (seed) m.add("flag.seed", std::to_string(*seed));
  return m;
}

void finish_manifest(Manifest& m, const fs::path& dir, const std::vector<std::string>& outputs,
                     Clock::time_point start) {
  for (std::size_t i = 0; i < outputs.size(); ++i) m.add("output." + std::to_string(i), outputs[i]);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  m.add("duration_seconds", format_double(seconds));
  write_manifest_file(dir / "manifest.txt", m);
}

struct SearchFlags {
  std::string score = "bic";
  double eps = 1e-6;
  std::size_t max_steps = 2000;
  std::string blacklist;
  std::string whitelist;
  std::size_t restarts = 0;
  std::size_t perturb = 0;

  void add_to(CLI::App* sub) {
    sub->add_option("--score", score, "loglik, aic, bic, ebic or gic");
    sub->add_option("--eps", eps, "stop once the best score decrease is below this")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-steps", max_steps, "search step limit");
    sub->add_option("--blacklist", blacklist, "edge list of forbidden edges");
    sub->add_option("--whitelist", whitelist, "edge list of required edges");
    sub->add_option("--restarts", restarts, "random restart rounds");
    sub->add_option("--perturb", perturb, "random deletions/reversals per restart");
  }

  SearchSettings settings(const std::vector<std::string>& names) const {
    SearchSettings s;
    try {
      s.kind = score_kind_from_string(score);
    } catch (const Error& err) {
      throw UsageError(std::string("--score: ") + err.what());
    }
    s.eps = eps;
    s.max_steps = max_steps;
    s.restarts = restarts;
    s.perturb = perturb;
    if (!blacklist.empty()) s.constraints.blacklist = read_edge_pairs_file(blacklist, names);
    if (!whitelist.empty()) s.constraints.whitelist = read_edge_pairs_file(whitelist, names);
    return s;
  }
};

struct SimFlags {
  std::string truth;
  std::size_t p = 0;
  std::size_t edges = 0;
  std::size_t n = 100;
  std::string snr = "0.5:1.5";
  std::string coef = "0.3:0.5";
  std::string noise = "gaussian";

  void add_to(CLI::App* sub) {
    sub->add_option("--truth", truth, "edge list of the generating graph");
    sub->add_option("--p", p, "number of nodes of a random graph");
    sub->add_option("--edges", edges, "number of edges of a random graph");
    sub->add_option("--n", n, "sample size")->check(CLI::PositiveNumber);
    sub->add_option("--snr", snr, "signal-to-noise range LO:HI");
    sub->add_option("--coef", coef, "coefficient magnitude range LO:HI");
    sub->add_option("--noise", noise, "gaussian, t:DF or gamma:SHAPE:SCALE");
  }

  LabeledGraph graph(std::uint64_t seed) const {
    if (!truth.empty()) {
      if (p != 0 || edges != 0) throw UsageError("--truth cannot be combined with --p/--edges");
      return read_edge_list_file(truth);
    }
    if (p == 0) throw UsageError("either --truth or --p is required");
    return {generate_random_dag(p, edges, substream_seed(seed, 0)), default_names(p)};
  }

  SimConfig config(const Dag& g, std::uint64_t seed) const {
    SimConfig c;
    c.graph = g;
    c.n = n;
    std::tie(c.snr_low, c.snr_high) = parse_range(snr, "snr");
    std::tie(c.coef_low, c.coef_high) = parse_range(coef, "coef");
    try {
      c.noise = parse_noise(noise);
    } catch (const Error& err) {
      throw UsageError(std::string("--noise: ") + err.what());
    }
    c.seed = seed;
    return c;
  }
};

std::string method_name(double alpha) {
  if (alpha == 2.0) return "SHD";
  if (alpha == 1.0) return "adjSHD";
  return "GSHD(" + format_double(alpha) + ")";
}

std::string mean_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", mean, sd);
  return buf;
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) { build(); }

  int run(const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app_.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << help_for_parsed();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app_.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion&) {
      out_ << kVersion << '\n';
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n\n" << help_for_parsed();
      return 2;
    }
    for (auto& [sub, action] : actions_) {
      if (!sub->parsed()) continue;
      try {
        action();
        return 0;
      } catch (const UsageError& e) {
        err_ << "error: " << e.what() << "\n\n" << sub->help();
        return 2;
      } catch (const std::exception& e) {
        err_ << "error: " << e.what() << '\n';
        return 1;
      }
    }
    err_ << app_.help();
    return 2;
  }

 private:
  std::string help_for_parsed() const {
    for (const auto& [sub, action] : actions_)
      if (sub->parsed()) return sub->help();
    return app_.help();
  }

  CLI::App* add(const std::string& name, const std::string& about, std::function<void()> action) {
    CLI::App* sub = app_.add_subcommand(name, about);
    actions_.emplace_back(sub, std::move(action));
    return sub;
  }

  void build() {
    app_.require_subcommand(1);
    app_.set_version_flag("--version", std::string(kVersion));
    app_.option_defaults()->always_capture_default();
    build_simulate();
    build_learn();
    build_bag();
    build_aggregate();
    build_evaluate();
    build_curve();
    build_replicate();
    build_rerun();
  }

  void build_simulate() {
    CLI::App* sub = add("simulate", "simulate data from a linear Gaussian structural model", [this] {
      const auto start = Clock::now();
      const std::uint64_t seed = resolve_seed(seed_);
      Manifest m = start_manifest(*subs_.at("simulate"), seed);
      const LabeledGraph truth = sim_.graph(seed);
      const Simulation sim = simulate(sim_.config(truth.graph, substream_seed(seed, 1)));
      const fs::path dir = out_dir_;
      fs::create_directories(dir);
      {
        auto f = open_file(dir / "data.csv");
        write_data(f, sim.raw, truth.labels);
      }
      write_edge_list_file(dir / "truth.tsv", truth.graph, truth.labels);
      {
        auto f = open_file(dir / "simulation.txt");
        f << "# noise: " << sim_.noise << '\n';
        f << "node\tparents\tcoefficients\tsigma\ttarget_snr\tachieved_snr\n";
        for (NodeId i = 0; i < sim.nodes.size(); ++i) {
          const NodeRecord& r = sim.nodes[i];
          f << truth.labels[i] << '\t';
          for (std::size_t k = 0; k < r.parents.size(); ++k)
            f << (k ? "," : "") << truth.labels[r.parents[k]];
          f << '\t';
          for (std::size_t k = 0; k < r.coefficients.size(); ++k)
            f << (k ? "," : "") << format_double(r.coefficients[k]);
          f << '\t' << format_double(r.sigma) << '\t' << format_double(r.target_snr) << '\t'
            << format_double(r.achieved_snr) << '\n';
        }
      }
      finish_manifest(m, dir, {"data.csv", "truth.tsv", "simulation.txt"}, start);
      out_ << "simulate: n=" << sim.data.n() << " p=" << sim.data.p()
           << " edges=" << truth.graph.edge_count() << " -> " << dir.string() << '\n';
    });
    subs_["simulate"] = sub;
    sim_.add_to(sub);
    sub->add_option("--seed", seed_, "master seed (default: DAGBAG_SEED or random)");
    sub->add_option("--out", out_dir_, "output directory")->required();
  }

  void build_learn() {
    CLI::App* sub = add("learn", "hill-climbing structure search on one dataset", [this] {
      const auto start = Clock::now();
      const std::uint64_t seed = resolve_seed(seed_);
      Manifest m = start_manifest(*subs_.at("learn"), seed);
      const Dataset data = load_dataset(data_);
      const SearchSettings settings = search_.settings(data.names());
      std::optional<Dag> truth;
      if (!truth_.empty()) truth = align(read_edge_list_file(truth_), data.names(), truth_);
      std::optional<Dag> init;
      if (!init_.empty()) init = align(read_edge_list_file(init_), data.names(), init_);
      const SearchResult r = learn(data, settings, seed, truth ? &*truth : nullptr, init);

      const fs::path dir = out_dir_;
      fs::create_directories(dir);
      write_edge_list_file(dir / "graph.tsv", r.graph, data.names());
      write_edge_list_file(dir / "initial.tsv", r.initial, data.names());
      {
        auto f = open_file(dir / "trace.tsv");
        write_trace(f, r.trace, data.names());
      }
      finish_manifest(m, dir, {"graph.tsv", "initial.tsv", "trace.tsv"}, start);
      out_ << "learn: " << r.graph.edge_count() << " edges, score " << format_double(r.final_score)
           << ", " << r.trace.steps.size() << " steps (" << to_string(r.trace.stop_reason)
           << ") -> " << dir.string() << '\n';
    });
    subs_["learn"] = sub;
    sub->add_option("--data", data_, "CSV/TSV data file")->required();
    search_.add_to(sub);
    sub->add_option("--init", init_, "edge list of the starting graph");
    sub->add_option("--truth", truth_, "true graph, adds correct-edge counts to the trace");
    sub->add_option("--seed", seed_, "seed for random restarts (default: DAGBAG_SEED or random)");
    sub->add_option("--out", out_dir_, "output directory")->required();
  }

  void write_aggregation(const fs::path& dir, const AggregationResult& a, const SelectionTable& t,
                         const std::vector<std::string>& labels) {
    auto g = open_file(dir / "aggregated.tsv");
    auto c = open_file(dir / "cyclic.tsv");
    write_aggregated(g, c, a, t, labels);
  }

  void build_bag() {
    CLI::App* sub = add("bag", "bootstrap ensemble of hill climbs plus aggregation", [this] {
      const auto start = Clock::now();
      const std::uint64_t seed = resolve_seed(seed_);
      Manifest m = start_manifest(*subs_.at("bag"), seed);
      const Dataset data = load_dataset(data_);
      const SearchSettings settings = search_.settings(data.names());
      const Ensemble e = learn_ensemble(data, boot_, settings, seed, jobs_);
      const SelectionTable table = selection_frequencies(e);
      const AggregationResult a = aggregate(table, alpha_);

      const fs::path dir = out_dir_;
      fs::create_directories(dir);
      write_ensemble(dir / "ensemble", e, data.names());
      write_aggregation(dir, a, table, data.names());
      finish_manifest(m, dir, {"ensemble/ensemble.txt", "aggregated.tsv", "cyclic.tsv"}, start);
      out_ << "bag: " << e.graphs.size() << " members, " << a.graph.edge_count()
           << " aggregated edges, " << a.cyclic_edges.size() << " cyclic edges"
           << (a.certified_optimal ? " (certified optimal)" : "") << " -> " << dir.string() << '\n';
    });
    subs_["bag"] = sub;
    sub->add_option("--data", data_, "CSV/TSV data file")->required();
    sub->add_option("--boot", boot_, "number of bootstrap resamples")->check(CLI::PositiveNumber);
    search_.add_to(sub);
    sub->add_option("--alpha", alpha_, "GSHD weight: 1 = adjSHD, 2 = SHD")
        ->check(CLI::Range(0.0, 2.0));
    sub->add_option("--jobs", jobs_, "worker threads (0 = all cores)");
    sub->add_option("--seed", seed_, "master seed (default: DAGBAG_SEED or random)");
    sub->add_option("--out", out_dir_, "output directory")->required();
  }

  void build_aggregate() {
    CLI::App* sub = add("aggregate", "aggregate a stored ensemble", [this] {
      const auto start = Clock::now();
      Manifest m = start_manifest(*subs_.at("aggregate"), std::nullopt);
      const auto [e, labels] = read_ensemble(ensemble_);
      const SelectionTable table = selection_frequencies(e);
      const AggregationResult a = aggregate(table, alpha_);
      const fs::path dir = out_dir_;
      fs::create_directories(dir);
      write_aggregation(dir, a, table, labels);
      finish_manifest(m, dir, {"aggregated.tsv", "cyclic.tsv"}, start);
      out_ << "aggregate: " << a.graph.edge_count() << " edges, " << a.cyclic_edges.size()
           << " cyclic edges" << (a.certified_optimal ? " (certified optimal)" : "") << " -> "
           << dir.string() << '\n';
    });
    subs_["aggregate"] = sub;
    sub->add_option("--ensemble", ensemble_, "ensemble directory written by bag")->required();
    sub->add_option("--alpha", alpha_, "GSHD weight: 1 = adjSHD, 2 = SHD")
        ->check(CLI::Range(0.0, 2.0));
    sub->add_option("--out", out_dir_, "output directory")->required();
  }

  void build_evaluate() {
    CLI::App* sub = add("evaluate", "compare a learned graph with the truth", [this] {
      const LabeledGraph truth = read_edge_list_file(truth_);
      const Dag learned = align(read_edge_list_file(learned_), truth.labels, learned_);
      const EvalReport r = evaluate(learned, truth.graph);
      write_report(out_, r);
      if (!out_file_.empty()) {
        auto f = open_file(out_file_);
        write_report(f, r);
      }
    });
    subs_["evaluate"] = sub;
    sub->add_option("--learned", learned_, "edge list of the learned graph")->required();
    sub->add_option("--truth", truth_, "edge list of the true graph")->required();
    sub->add_option("--out", out_file_, "also write the report here");
  }

  void build_curve() {
    CLI::App* sub = add("curve", "learning curve of a search trace or an aggregation", [this] {
      const LabeledGraph truth = read_edge_list_file(truth_);
      if (trace_.empty() == aggregated_.empty()) {
        throw UsageError("exactly one of --trace and --aggregated is required");
      }
      std::vector<CurveRow> rows;
      if (!trace_.empty()) {
        std::ifstream in(trace_);
        if (!in) throw Error("cannot open '" + trace_ + "' for reading");
        const auto ops = read_trace_operations(in, truth.labels, trace_);
        Dag initial(truth.labels.size());
        if (!initial_.empty()) initial = align(read_edge_list_file(initial_), truth.labels, initial_);
        rows = learning_curve(initial, ops, truth.graph);
      } else {
        if (!initial_.empty()) throw UsageError("--initial only applies to --trace");
        std::ifstream in(aggregated_);
        if (!in) throw Error("cannot open '" + aggregated_ + "' for reading");
        rows = learning_curve(read_aggregated_additions(in, truth.labels, aggregated_), truth.graph);
      }
      if (out_file_.empty()) {
        write_curve(out_, rows);
      } else {
        auto f = open_file(out_file_);
        write_curve(f, rows);
      }
    });
    subs_["curve"] = sub;
    sub->add_option("--truth", truth_, "edge list of the true graph")->required();
    sub->add_option("--trace", trace_, "trace.tsv written by learn");
    sub->add_option("--initial", initial_, "starting graph of the trace (default: empty)");
    sub->add_option("--aggregated", aggregated_, "aggregated.tsv written by bag or aggregate");
    sub->add_option("--out", out_file_, "output file (default: stdout)");
  }

  void build_replicate() {
    CLI::App* sub = add("replicate", "repeated simulate/learn/bag rounds with summary tables", [this] {
      const auto start = Clock::now();
      const std::uint64_t seed = resolve_seed(seed_);
      Manifest m = start_manifest(*subs_.at("replicate"), seed);
      const LabeledGraph truth = sim_.graph(seed);
      SearchSettings settings = search_.settings(truth.labels);
      const std::vector<double> alphas = parse_list(alphas_, "alphas");
      for (double a : alphas)
        if (!(a > 0.0 && a <= 2.0)) throw UsageError("--alphas: values must lie in (0, 2]");

      std::vector<std::string> methods = {"score"};
      for (double a : alphas) methods.push_back(method_name(a));
      std::vector<std::vector<EvalReport>> reports(methods.size());

      const fs::path dir = out_dir_;
      fs::create_directories(dir);
      write_edge_list_file(dir / "truth.tsv", truth.graph, truth.labels);
      auto reps_file = open_file(dir / "replicates.tsv");
      reps_file << "rep\tmethod\ttotal_e\tcorrect_e\ttotal_v\tcorrect_v\ttotal_m\tcorrect_m\n";
      for (std::size_t r = 0; r < reps_; ++r) {
        const Simulation sim = simulate(sim_.config(truth.graph, substream_seed(seed, r + 1, 0)));
        std::vector<Dag> learned;
        learned.push_back(learn(sim.data, settings, substream_seed(seed, r + 1, 1)).graph);
        const Ensemble e =
            learn_ensemble(sim.data, boot_, settings, substream_seed(seed, r + 1, 2), jobs_);
        const SelectionTable table = selection_frequencies(e);
        for (double a : alphas) learned.push_back(aggregate(table, a).graph);
        for (std::size_t k = 0; k < methods.size(); ++k) {
          const EvalReport rep = evaluate(learned[k], truth.graph);
          reports[k].push_back(rep);
          reps_file << r << '\t' << methods[k] << '\t' << rep.total_e << '\t' << rep.correct_e
                    << '\t' << rep.total_v << '\t' << rep.correct_v << '\t' << rep.total_m << '\t'
                    << rep.correct_m << '\n';
        }
      }
      reps_file.close();

      std::ostringstream table;
      table << "# graph: " << (graph_label_.empty() ? "unnamed" : graph_label_)
            << "  p=" << truth.graph.size() << "  edges=" << truth.graph.edge_count()
            << "  n=" << sim_.n << "  reps=" << reps_ << "  boot=" << boot_
            << "  score=" << search_.score << '\n';
      table << "method\tCorrect E\tTotal E\tCorrect V\tTotal V\tCorrect M\tTotal M\n";
      for (std::size_t k = 0; k < methods.size(); ++k) {
        std::vector<double> cols[6];
        for (const EvalReport& rep : reports[k]) {
          const std::size_t counts[6] = {rep.correct_e, rep.total_e, rep.correct_v,
                                         rep.total_v,   rep.correct_m, rep.total_m};
          for (int c = 0; c < 6; ++c) cols[c].push_back(static_cast<double>(counts[c]));
        }
        table << methods[k];
        for (const auto& col : cols) table << '\t' << (col.empty() ? "-" : mean_sd(col));
        table << '\n';
      }
      {
        auto f = open_file(dir / "table.tsv");
        f << table.str();
      }
      finish_manifest(m, dir, {"truth.tsv", "replicates.tsv", "table.tsv"}, start);
      out_ << table.str();
    });
    subs_["replicate"] = sub;
    sim_.add_to(sub);
    sub->add_option("--graph", graph_label_, "name printed in the table header");
    sub->add_option("--reps", reps_, "number of simulated datasets")->check(CLI::PositiveNumber);
    sub->add_option("--boot", boot_, "bootstrap resamples per dataset")->check(CLI::PositiveNumber);
    sub->add_option("--alphas", alphas_, "comma-separated GSHD weights to aggregate with");
    search_.add_to(sub);
    sub->add_option("--jobs", jobs_, "worker threads (0 = all cores)");
    sub->add_option("--seed", seed_, "master seed (default: DAGBAG_SEED or random)");
    sub->add_option("--out", out_dir_, "output directory")->required();
  }

  void build_rerun() {
    CLI::App* sub = add("rerun", "repeat a run recorded in a manifest", [this] {
      const Manifest m = read_manifest_file(manifest_);
      const std::string command = m.require("subcommand");
      if (command == "rerun" || !subs_.contains(command)) {
        throw Error(manifest_ + ": cannot rerun subcommand '" + command + "'");
      }
      std::vector<std::string> args = {command};
      for (const auto& [key, value] : m.entries()) {
        if (key.rfind("flag.", 0) != 0) continue;
        const std::string flag = key.substr(5);
        args.push_back("--" + flag);
        args.push_back(flag == "out" && !out_dir_.empty() ? out_dir_ : value);
      }
      Cli inner(out_, err_);
      const int status = inner.run(args);
      if (status != 0) throw Error("rerun of '" + command + "' failed");
    });
    subs_["rerun"] = sub;
    sub->add_option("--manifest", manifest_, "manifest.txt of an earlier run")->required();
    sub->add_option("--out", out_dir_, "output directory (default: the recorded one)");
  }

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Bayesian network structure learning by hill climbing and bootstrap aggregation",
                "dagbag"};
  std::vector<std::pair<CLI::App*, std::function<void()>>> actions_;
  std::map<std::string, CLI::App*> subs_;

  SimFlags sim_;
  SearchFlags search_;
  std::optional<std::uint64_t> seed_;
  std::string out_dir_;
  std::string out_file_;
  std::string data_;
  std::string truth_;
  std::string init_;
  std::string learned_;
  std::string trace_;
  std::string initial_;
  std::string aggregated_;
  std::string ensemble_;
  std::string manifest_;
  std::string graph_label_;
  std::string alphas_ = "2,1";
  std::size_t boot_ = 100;
  std::size_t reps_ = 10;
  std::size_t jobs_ = 0;
  double alpha_ = 1.0;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

}  // namespace dagbag::cli
