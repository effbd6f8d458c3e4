#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "exactbn/dataset.hpp"
#include "exactbn/errors.hpp"
#include "exactbn/explore.hpp"
#include "exactbn/local_scores.hpp"
#include "exactbn/network_io.hpp"
#include "exactbn/optimizer.hpp"

namespace exactbn::cli {

namespace {

/// Flag combinations that parse but make no sense together.
class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr const char* kCacheDirEnv = "EXACTBN_CACHE_DIR";

struct RunConfig {
  std::string data;
  std::string score = "bde";
  std::optional<double> ess;
  std::string precision = "4";
  std::string arities;
  std::string names;
  std::string cache;
  std::string out;
  std::string dot;
  std::string shard;
  unsigned jobs = 0;
  std::string order;
  int max_shift = -1;
  std::string grid;
  std::string network;
  std::string train;
  std::string test;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> inputs;

  ScoreSpec spec() const {
    ScoreSpec s;
    s.kind = parse_score_kind(score);
    if (ess) {
      if (s.kind != ScoreKind::kBde) throw UsageError("--ess only applies to --score bde");
      s.ess = *ess;
    }
    s.validate();
    return s;
  }
  unsigned threads() const { return jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : jobs; }
  TraversalOptions traversal() const {
    TraversalOptions t;
    t.precision = parse_precision(precision);
    t.threads = threads();
    return t;
  }
};

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!item.empty()) items.push_back(std::move(item));
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) items.push_back(std::move(item));
  return items;
}

template <class T>
std::vector<T> parse_numbers(const std::string& text, const char* what) {
  std::vector<T> values;
  for (const auto& item : split_list(text)) {
    T value{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    }
    values.push_back(value);
  }
  return values;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_data(const RunConfig& cfg, const std::string& path) {
  LoadOptions opts;
  if (!cfg.arities.empty()) opts.arities = parse_numbers<Arity>(cfg.arities, "arity");
  return load_dataset(path, opts);
}

std::vector<std::string> load_names(const RunConfig& cfg, int n) {
  if (cfg.names.empty()) return default_names(n);
  std::vector<std::string> names;
  std::istringstream in(read_file(cfg.names));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.front() == '#') continue;
    for (auto& name : split_list(line)) names.push_back(std::move(name));
  }
  if (static_cast<int>(names.size()) != n) {
    throw DataError("names file lists " + std::to_string(names.size()) + " names for " + std::to_string(n) +
                    " variables");
  }
  return names;
}

/// Output stream that is either `fallback` or a file.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::trunc);
      if (!file_) throw DataError("cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

/// Local scores from --cache or computed from the data file.
LocalScoreStore obtain_store(const RunConfig& cfg) {
  if (!cfg.cache.empty()) {
    LocalScoreStore store = load_store(cfg.cache);
    if (!cfg.data.empty()) {
      const Dataset data = load_data(cfg, cfg.data);
      if (data.arities() != store.arities()) throw CacheError("cache arities do not match the data file");
    }
    return store;
  }
  if (cfg.data.empty()) throw UsageError("need a data file or --cache");
  return compute_all(load_data(cfg, cfg.data), cfg.spec(), cfg.traversal());
}

Ordering parse_order(const std::string& text, int n) {
  Ordering ord = parse_numbers<int>(text, "ordering");
  try {
    check_ordering(ord, n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--order: ") + e.what());
  }
  return ord;
}

std::string default_cache_path(const RunConfig& cfg, const std::string& suffix) {
  const char* dir = std::getenv(kCacheDirEnv);
  if (!dir || !*dir) throw UsageError(std::string("--out is required (or set ") + kCacheDirEnv + ")");
  return (std::filesystem::path(dir) / (std::filesystem::path(cfg.data).stem().string() + suffix)).string();
}

// Subcommands

void cmd_scores(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load_data(cfg, cfg.data);
  const ScoreSpec spec = cfg.spec();
  TraversalOptions opts = cfg.traversal();
  if (cfg.shard.empty()) {
    const std::string path = cfg.out.empty() ? default_cache_path(cfg, ".bnls") : cfg.out;
    const LocalScoreStore store = compute_all(data, spec, opts);
    save_store(path, store);
    out << "wrote " << path << ": " << store.entry_count() << " local scores\n";
    return;
  }
  const std::size_t slash = cfg.shard.find('/');
  if (slash == std::string::npos) throw UsageError("--shard expects i/m");
  const auto parts = parse_numbers<std::uint32_t>(cfg.shard.substr(0, slash) + "," + cfg.shard.substr(slash + 1), "shard");
  if (parts.size() != 2) throw UsageError("--shard expects i/m");
  if (parts[1] == 0 || parts[0] >= parts[1]) throw UsageError("--shard index must be below the shard count");
  const std::string path =
      cfg.out.empty() ? default_cache_path(cfg, ".shard" + std::to_string(parts[0]) + "of" + std::to_string(parts[1]) + ".bnlp")
                      : cfg.out;
  const ShardResult shard = compute_shard(data, spec, parts[0], parts[1], opts);
  save_shard(path, shard);
  out << "wrote " << path << ": shard " << parts[0] << "/" << parts[1] << ", " << shard.records.size()
      << " local scores\n";
}

void cmd_merge(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw UsageError("merge needs --out");
  std::vector<ShardResult> shards;
  for (const auto& path : cfg.inputs) shards.push_back(load_shard(path));
  const LocalScoreStore store = merge_shards(shards);
  save_store(cfg.out, store);
  out << "wrote " << cfg.out << ": " << store.entry_count() << " local scores from " << shards.size() << " shards\n";
}

NetworkDoc make_doc(const LocalScoreStore& store, Network net, Ordering ord, double score,
                    std::vector<std::string> names) {
  NetworkDoc doc;
  doc.network = std::move(net);
  doc.ordering = std::move(ord);
  doc.spec = store.spec();
  doc.precision = store.precision();
  doc.total_score = score;
  doc.names = std::move(names);
  return doc;
}

void write_doc(const RunConfig& cfg, const NetworkDoc& doc, std::ostream& out) {
  Output o(cfg.out, out);
  *o << to_json(doc);
  if (!cfg.dot.empty()) {
    std::ofstream dot(cfg.dot, std::ios::trunc);
    if (!dot) throw DataError("cannot write " + cfg.dot);
    dot << to_dot(doc.network, doc.names);
  }
}

void cmd_learn(const RunConfig& cfg, std::ostream& out) {
  const LocalScoreStore store = obtain_store(cfg);
  const LearnResult r = learn(store, cfg.threads());
  write_doc(cfg, make_doc(store, r.network, r.ordering, r.total_score, load_names(cfg, store.num_vars())), out);
}

void cmd_best_order(const RunConfig& cfg, std::ostream& out) {
  const LocalScoreStore store = obtain_store(cfg);
  const LearnResult r = learn(store, cfg.threads());
  Output o(cfg.out, out);
  *o << "ordering: ";
  for (std::size_t i = 0; i < r.ordering.size(); ++i) *o << (i ? "," : "") << r.ordering[i];
  *o << "\nscore: " << format_double(r.total_score) << "\n";
}

void cmd_net_for_order(const RunConfig& cfg, std::ostream& out) {
  if (cfg.order.empty()) throw UsageError("net-for-order needs --order");
  const LocalScoreStore store = obtain_store(cfg);
  const Ordering ord = parse_order(cfg.order, store.num_vars());
  const BestParentStore best = best_parents(store, cfg.threads());
  write_doc(cfg,
            make_doc(store, ord_to_net(ord, best), ord, score_for_ordering(ord, best),
                     load_names(cfg, store.num_vars())),
            out);
}

/// The --order ordering, or the optimal one.
Ordering scan_base(const RunConfig& cfg, const LocalScoreStore& store, const BestParentStore& best) {
  if (!cfg.order.empty()) return parse_order(cfg.order, store.num_vars());
  return sinks_to_ord(best_sinks(best));
}

void cmd_rotations(const RunConfig& cfg, std::ostream& out) {
  const LocalScoreStore store = obtain_store(cfg);
  const BestParentStore best = best_parents(store, cfg.threads());
  const Ordering base = scan_base(cfg, store, best);
  const int max_shift = cfg.max_shift < 0 ? store.num_vars() / 2 : cfg.max_shift;
  const OrderingScan scan = rotations(base, best, max_shift);
  Output o(cfg.out, out);
  *o << "k,score\n";
  for (const auto& e : scan.entries) *o << e.transform.first << ',' << format_double(e.score) << '\n';
}

void cmd_swaps(const RunConfig& cfg, std::ostream& out) {
  const LocalScoreStore store = obtain_store(cfg);
  const BestParentStore best = best_parents(store, cfg.threads());
  const Ordering base = scan_base(cfg, store, best);
  const OrderingScan scan = swaps(base, best);
  Output o(cfg.out, out);
  *o << "i,j,score\n";
  for (const auto& e : scan.entries) {
    *o << e.transform.first << ',' << e.transform.second << ',' << format_double(e.score) << '\n';
  }
}

/// "a,b,c" or "log:lo:hi:count"; empty selects the default grid.
std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return default_ess_grid();
  if (text.rfind("log:", 0) == 0) {
    std::string rest = text.substr(4);
    std::replace(rest.begin(), rest.end(), ':', ',');
    const auto parts = parse_numbers<double>(rest, "grid");
    if (parts.size() != 3 || parts[2] < 1) throw UsageError("--grid log:lo:hi:count");
    try {
      return log_grid(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--grid: ") + e.what());
    }
  }
  const auto grid = parse_numbers<double>(text, "grid");
  if (grid.empty()) throw UsageError("--grid is empty");
  return grid;
}

void cmd_sweep_ess(const RunConfig& cfg, std::ostream& out) {
  if (cfg.ess || parse_score_kind(cfg.score) != ScoreKind::kBde) {
    throw UsageError("sweep-ess always uses BDe; give ESS values with --grid");
  }
  const Dataset data = load_data(cfg, cfg.data);
  const std::vector<double> grid = parse_grid(cfg.grid);
  for (double e : grid) {
    if (!(e > 0.0)) throw UsageError("--grid values must be positive");
  }
  LearnOptions opts;
  opts.traversal = cfg.traversal();
  const auto points = ess_sweep(data, grid, opts);
  Output o(cfg.out, out);
  *o << "ess,arcs,score\n";
  for (const auto& p : points) *o << format_double(p.ess) << ',' << p.arcs << ',' << format_double(p.score) << '\n';
}

NetworkDoc load_doc(const RunConfig& cfg) {
  if (cfg.network.empty()) throw UsageError("need --network");
  return parse_network_doc(read_file(cfg.network));
}

double ess_or_default(const RunConfig& cfg) {
  const double ess = cfg.ess.value_or(1.0);
  if (!(ess > 0.0)) throw UsageError("--ess must be positive");
  return ess;
}

void cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const NetworkDoc doc = load_doc(cfg);
  if (cfg.train.empty()) throw UsageError("sample needs --train data to fit parameters");
  const Dataset train = load_data(cfg, cfg.train);
  if (train.num_vars() != doc.network.num_vars()) throw DataError("network and data have different variable counts");
  if (cfg.count == 0) throw UsageError("--count must be positive");
  const ParamNetwork pnet = fit_expected(doc.network, train, ess_or_default(cfg));
  const Dataset samples = sample(pnet, cfg.count, cfg.seed);
  Output o(cfg.out, out);
  write_dataset(*o, samples,
                "rng: " + std::string(CounterRng::kAlgorithm) + " seed=" + std::to_string(cfg.seed) +
                    "\nparameters: expected values, ess=" + format_double(ess_or_default(cfg)));
}

void cmd_predict(const RunConfig& cfg, std::ostream& out) {
  const NetworkDoc doc = load_doc(cfg);
  if (cfg.train.empty() || cfg.test.empty()) throw UsageError("predict needs --train and --test");
  const Dataset train = load_data(cfg, cfg.train);
  LoadOptions test_opts;
  test_opts.arities = train.arities();
  const Dataset test = load_dataset(cfg.test, test_opts);
  if (train.num_vars() != doc.network.num_vars()) throw DataError("network and data have different variable counts");
  const Prediction p = predict_logp(doc.network, train, test, ess_or_default(cfg));
  Output o(cfg.out, out);
  *o << "row,logp\n";
  for (std::size_t i = 0; i < p.log_prob.size(); ++i) *o << i << ',' << format_double(p.log_prob[i]) << '\n';
  *o << "# mean_logp=" << format_double(p.mean_log_prob) << " mean_p=" << format_double(p.mean_prob) << '\n';
}

void cmd_report(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.empty()) throw UsageError("report needs a data file");
  const Dataset data = load_data(cfg, cfg.data);
  const auto start = std::chrono::steady_clock::now();
  Network net;
  double score = 0.0;
  std::string spec_text;
  if (!cfg.network.empty()) {
    const NetworkDoc doc = load_doc(cfg);
    if (doc.network.num_vars() != data.num_vars()) throw DataError("network and data have different variable counts");
    net = doc.network;
    const ScoreSpec spec = cfg.ess || cfg.score != "bde" ? cfg.spec() : doc.spec;
    const LocalScoreStore store = compute_all(data, spec, cfg.traversal());
    score = network_score(net, store);
    spec_text = std::string(to_string(spec.kind)) + (spec.kind == ScoreKind::kBde ? " ess=" + format_double(spec.ess) : "");
  } else {
    const LocalScoreStore store = obtain_store(cfg);
    if (store.arities() != data.arities()) throw CacheError("cache arities do not match the data file");
    const LearnResult r = learn(store, cfg.threads());
    net = r.network;
    score = r.total_score;
    const ScoreSpec& spec = store.spec();
    spec_text = std::string(to_string(spec.kind)) + (spec.kind == ScoreKind::kBde ? " ess=" + format_double(spec.ess) : "");
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Output o(cfg.out, out);
  *o << "n: " << data.num_vars() << '\n';
  *o << "N: " << data.num_rows() << '\n';
  *o << "arities:";
  for (Arity a : data.arities()) *o << ' ' << a;
  *o << '\n';
  *o << "score_spec: " << spec_text << '\n';
  *o << "total_score: " << format_double(score) << '\n';
  *o << "arcs: " << net.arc_count() << '\n';
  *o << "max_in_degree: " << net.max_in_degree() << '\n';
  *o << "seconds: " << format_double(seconds) << '\n';
}

void add_input_options(CLI::App* cmd, RunConfig& cfg, bool data_required) {
  auto* data = cmd->add_option("data", cfg.data, "data file (rows of non-negative integers)");
  if (data_required) data->required();
  cmd->add_option("--arities", cfg.arities, "explicit per-column arities, comma separated");
}

void add_score_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--score", cfg.score, "bde, bic or aic")->default_val("bde");
  cmd->add_option("--ess", cfg.ess, "BDe equivalent sample size (default 1.0)");
  cmd->add_option("--precision", cfg.precision, "score storage width in bytes: 4 or 8")->default_val("4");
  cmd->add_option("--jobs,-j", cfg.jobs, "worker threads (default: all cores)");
}

void add_store_options(CLI::App* cmd, RunConfig& cfg) {
  add_input_options(cmd, cfg, false);
  add_score_options(cmd, cfg);
  cmd->add_option("--cache", cfg.cache, "local score cache written by 'scores' or 'merge'");
  cmd->add_option("--names", cfg.names, "file with one name per variable");
  cmd->add_option("--out,-o", cfg.out, "output path (default stdout)");
}

int classify(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kBadFlags;
  if (dynamic_cast<const LimitError*>(&e)) return kTooManyVariables;
  if (dynamic_cast<const CacheError*>(&e)) return kCacheMismatch;
  if (dynamic_cast<const DataError*>(&e)) return kDataError;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kBadFlags;
  return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Globally optimal Bayesian network structures for complete discrete data", "exactbn"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* scores = app.add_subcommand("scores", "compute all local scores into a cache file");
  add_input_options(scores, cfg, true);
  add_score_options(scores, cfg);
  scores->add_option("--out,-o", cfg.out, "cache path (default $EXACTBN_CACHE_DIR/<data>.bnls)");
  scores->add_option("--shard", cfg.shard, "compute only shard i of m, written as a partial cache");

  auto* merge = app.add_subcommand("merge", "combine shard outputs into one cache");
  merge->add_option("shards", cfg.inputs, "partial cache files")->required();
  merge->add_option("--out,-o", cfg.out, "cache path")->required();

  auto* learn_cmd = app.add_subcommand("learn", "find a globally optimal network");
  add_store_options(learn_cmd, cfg);
  learn_cmd->add_option("--dot", cfg.dot, "also write a Graphviz digraph");

  auto* best_order = app.add_subcommand("best-order", "print an optimal variable ordering");
  add_store_options(best_order, cfg);

  auto* net_for_order = app.add_subcommand("net-for-order", "best network consistent with an ordering");
  add_store_options(net_for_order, cfg);
  net_for_order->add_option("--order", cfg.order, "comma separated permutation of 0..n-1")->required();
  net_for_order->add_option("--dot", cfg.dot, "also write a Graphviz digraph");

  auto* rot = app.add_subcommand("rotations", "scores of cyclic shifts of an ordering (CSV k,score)");
  add_store_options(rot, cfg);
  rot->add_option("--order", cfg.order, "base ordering (default: optimal)");
  rot->add_option("--max-shift", cfg.max_shift, "largest |k| (default n/2)");

  auto* sw = app.add_subcommand("swaps", "scores of pairwise position swaps (CSV i,j,score)");
  add_store_options(sw, cfg);
  sw->add_option("--order", cfg.order, "base ordering (default: optimal)");

  auto* sweep = app.add_subcommand("sweep-ess", "optimal BDe network arc counts over ESS values (CSV)");
  add_input_options(sweep, cfg, true);
  add_score_options(sweep, cfg);
  sweep->add_option("--grid", cfg.grid, "'a,b,c' or 'log:lo:hi:count' (default log:2e-20:34000:25)");
  sweep->add_option("--out,-o", cfg.out, "output path (default stdout)");

  auto* sample_cmd = app.add_subcommand("sample", "draw data from a network with expected parameters");
  sample_cmd->add_option("--network", cfg.network, "network document")->required();
  sample_cmd->add_option("--train", cfg.train, "data the parameters are fitted to")->required();
  sample_cmd->add_option("--arities", cfg.arities, "explicit per-column arities");
  sample_cmd->add_option("--count", cfg.count, "number of rows")->default_val(100);
  sample_cmd->add_option("--seed", cfg.seed, "random seed")->default_val(1);
  sample_cmd->add_option("--ess", cfg.ess, "prior equivalent sample size (default 1.0)");
  sample_cmd->add_option("--out,-o", cfg.out, "output path (default stdout)");

  auto* predict = app.add_subcommand("predict", "predictive log probabilities of test rows (CSV row,logp)");
  predict->add_option("--network", cfg.network, "network document")->required();
  predict->add_option("--train", cfg.train, "training data")->required();
  predict->add_option("--test", cfg.test, "test data")->required();
  predict->add_option("--arities", cfg.arities, "explicit per-column arities");
  predict->add_option("--ess", cfg.ess, "prior equivalent sample size (default 1.0)");
  predict->add_option("--out,-o", cfg.out, "output path (default stdout)");

  auto* report = app.add_subcommand("report", "n, N, score, arc count and maximum in-degree");
  add_store_options(report, cfg);
  report->add_option("--network", cfg.network, "report on this network instead of learning one");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "exactbn: " << e.what() << '\n';
    return kBadFlags;
  }

  try {
    if (scores->parsed()) cmd_scores(cfg, out);
    else if (merge->parsed()) cmd_merge(cfg, out);
    else if (learn_cmd->parsed()) cmd_learn(cfg, out);
    else if (best_order->parsed()) cmd_best_order(cfg, out);
    else if (net_for_order->parsed()) cmd_net_for_order(cfg, out);
    else if (rot->parsed()) cmd_rotations(cfg, out);
    else if (sw->parsed()) cmd_swaps(cfg, out);
    else if (sweep->parsed()) cmd_sweep_ess(cfg, out);
    else if (sample_cmd->parsed()) cmd_sample(cfg, out);
    else if (predict->parsed()) cmd_predict(cfg, out);
    else if (report->parsed()) cmd_report(cfg, out);
  } catch (const std::exception& e) {
    err << "exactbn: " << e.what() << '\n';
    return classify(e);
  }
  return kOk;
}

}  // namespace exactbn::cli
