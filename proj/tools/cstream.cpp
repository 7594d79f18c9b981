// cstream: user-action mining and clickstream analysis over HTTP request
// logs. One binary, one subcommand per pipeline stage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cstream/classifier.hpp"
#include "cstream/config.hpp"
#include "cstream/features.hpp"
#include "cstream/generator.hpp"
#include "cstream/graph.hpp"
#include "cstream/history.hpp"
#include "cstream/https_sim.hpp"
#include "cstream/metrics.hpp"
#include "cstream/promoters.hpp"
#include "cstream/sessions.hpp"
#include "cstream/stats.hpp"
#include "cstream/trace.hpp"
#include "cstream/util.hpp"

namespace fs = std::filesystem;
using namespace cstream;

namespace {

// exit codes: 0 success, 1 usage, 2 input error, 3 internal invariant violation
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SuffixList load_suffixes_opt(const std::string& path) {
  if (path.empty()) return SuffixList{};
  auto in = open_input(path);
  return load_suffix_list(in);
}

AdBlacklist load_ads_opt(const std::string& path) {
  if (path.empty()) return default_ad_blacklist();
  auto in = open_input(path);
  return load_ad_blacklist(in);
}

PromoterConfig load_promoters_opt(const std::string& path) {
  if (path.empty()) return default_promoter_config();
  auto in = open_input(path);
  return load_promoter_config(in);
}

LogReadResult read_log_file(const std::string& path, const LogSchema& schema,
                            bool skip_malformed) {
  auto in = open_input(path);
  auto result = read_log(in, schema, skip_malformed);
  if (result.lines_skipped > 0) {
    std::cerr << "warning: skipped " << result.lines_skipped << " malformed lines in '" << path
              << "'\n";
    for (const auto& reason : result.skip_reasons) std::cerr << "  " << reason << '\n';
  }
  return result;
}

// truth file: "line_number<TAB>label"
std::vector<Label> read_truth_labels(const std::string& path, const LogReadResult& log) {
  auto in = open_input(path);
  std::map<std::size_t, Label> by_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw ParseError(line_no, "truth line needs 'line<TAB>label'");
    const auto n = parse_i64(cols[0]);
    const auto label = label_from_name(cols[1]);
    if (!n || *n < 1 || !label) throw ParseError(line_no, "bad truth entry");
    by_line[static_cast<std::size_t>(*n)] = *label;
  }
  std::vector<Label> labels;
  labels.reserve(log.records.size());
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto it = by_line.find(log.line_numbers[i]);
    if (it == by_line.end()) {
      throw InputError("truth file is missing line " + std::to_string(log.line_numbers[i]));
    }
    labels.push_back(it->second);
  }
  return labels;
}

void write_ecdf_csv(const std::string& path, const std::vector<double>& values) {
  auto out = open_output(path);
  out << "value,cum_fraction\n";
  if (values.empty()) return;
  for (const auto& [v, f] : stats::ecdf(values)) {
    out << format_double(v) << ',' << format_double(f) << '\n';
  }
}

std::vector<double> read_sample_file(const std::string& path) {
  auto in = open_input(path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    const auto v = parse_double(entry);
    if (!v) {
      if (line_no == 1) continue;  // tolerate a header row
      throw ParseError(line_no, "expected one number per line");
    }
    values.push_back(*v);
  }
  if (values.empty()) throw InputError("sample file '" + path + "' holds no values");
  return values;
}

struct GraphsDir {
  std::vector<HttpRecord> actions;
};

GraphsDir read_graphs_dir(const std::string& dir) {
  const fs::path manifest = fs::path(dir) / "actions.tsv";
  if (!fs::exists(manifest)) {
    throw InputError("'" + dir + "' has no actions.tsv (produce it with the graphs subcommand)");
  }
  GraphsDir out;
  out.actions = read_log_file(manifest.string(), LogSchema::labeled(), false).records;
  return out;
}

// --- subcommand payloads ----------------------------------------------------

struct GenArgs {
  std::string config_path;
  std::string out_path;
  std::string truth_path;
  std::string truth_graph_dir;
  std::string history_path;
  std::int64_t seed = -1;
};

int run_gen(const GenArgs& args) {
  GenConfig config;
  if (!args.config_path.empty()) {
    auto in = open_input(args.config_path);
    config = load_gen_config(in);
  }
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);

  const GeneratedTrace trace = generate(config);
  {
    auto out = open_output(args.out_path);
    write_trace(out, trace);
  }
  if (!args.truth_path.empty()) {
    auto out = open_output(args.truth_path);
    write_truth_labels(out, trace);
  }
  if (!args.truth_graph_dir.empty()) {
    fs::create_directories(args.truth_graph_dir);
    for (const auto& g : trace.truth_graphs) {
      const std::string name =
          to_hex16(browser_hash(g.browser)) + "_" + day_string(g.day) + ".graph";
      auto out = open_output((fs::path(args.truth_graph_dir) / name).string());
      write_truth_graph(out, g);
    }
  }
  if (!args.history_path.empty()) {
    auto out = open_output(args.history_path);
    for (const auto& [_, entries] : trace.history) write_history(out, entries);
  }
  std::cerr << "generated " << trace.records.size() << " records ("
            << trace.emitted_user_actions << " user-actions";
  if (trace.hidden_user_actions > 0) std::cerr << ", " << trace.hidden_user_actions << " hidden";
  std::cerr << ")\n";
  return kExitOk;
}

struct FeaturesArgs {
  std::string in_path;
  std::string out_path;
  std::string truth_path;
  std::string ads_path;
  double window_s = 30.0;
  double filter_threshold = 0.0;  // 0 disables the abnormal-browser filter
  unsigned jobs = 0;
};

int run_features(const FeaturesArgs& args) {
  auto log = read_log_file(args.in_path, LogSchema{}, true);
  std::vector<Label> labels;
  const std::vector<Label>* labels_ptr = nullptr;
  if (!args.truth_path.empty()) {
    labels = read_truth_labels(args.truth_path, log);
    labels_ptr = &labels;
  }
  if (args.filter_threshold > 0.0) {
    FilterReport report;
    // keep labels aligned: filter on indices
    std::vector<HttpRecord> kept = filter_abnormal_browsers(log.records, args.filter_threshold, &report);
    if (!report.removed.empty()) {
      std::cerr << "filtered " << report.removed.size() << " abnormal browsers ("
                << report.records_removed << " records)\n";
      if (labels_ptr) {
        throw InputError("--filter-abnormal cannot be combined with --truth (line mapping breaks)");
      }
    }
    log.records = std::move(kept);
  }
  const AdBlacklist ads = load_ads_opt(args.ads_path);
  const auto vectors =
      extract_features_from_log(std::move(log.records), ads, args.window_s, labels_ptr, args.jobs);
  auto out = open_output(args.out_path);
  write_feature_csv(out, vectors);
  std::cerr << "wrote " << vectors.size() << " feature rows\n";
  return kExitOk;
}

struct TrainArgs {
  std::string features_path;
  std::string model_path;
  bool forest = false;
  std::size_t trees = 101;
  std::size_t subset = 0;
  std::size_t min_leaf = 5;
  double min_gain = 1e-4;
  std::uint64_t seed = 1;
  bool no_bootstrap = false;
  unsigned jobs = 0;
};

TrainConfig to_train_config(bool forest, std::size_t trees, std::size_t subset,
                            std::size_t min_leaf, double min_gain, std::uint64_t seed,
                            bool no_bootstrap) {
  TrainConfig config;
  config.use_forest = forest;
  config.tree.min_leaf = min_leaf;
  config.tree.min_gain = min_gain;
  config.forest.tree = config.tree;
  config.forest.n_trees = trees;
  config.forest.feature_subset_size = subset;
  config.forest.seed = seed;
  config.forest.bootstrap = !no_bootstrap;
  return config;
}

int run_train(const TrainArgs& args) {
  auto in = open_input(args.features_path);
  const auto examples = read_feature_csv(in);
  const auto config = to_train_config(args.forest, args.trees, args.subset, args.min_leaf,
                                      args.min_gain, args.seed, args.no_bootstrap);
  const Model model = train_model(examples, config, args.jobs);
  auto out = open_output(args.model_path);
  out << model_to_json(model) << '\n';
  std::cerr << "trained " << (args.forest ? "forest" : "tree") << " on " << examples.size()
            << " examples\n";
  return kExitOk;
}

struct ClassifyArgs {
  std::string model_path;
  std::string in_path;
  std::string out_path;
  std::string ads_path;
  double window_s = 30.0;
  unsigned jobs = 0;
};

int run_classify(const ClassifyArgs& args) {
  const Model model = model_from_json(read_text_file(args.model_path));
  auto log = read_log_file(args.in_path, LogSchema{}, true);
  const AdBlacklist ads = load_ads_opt(args.ads_path);
  std::vector<HttpRecord> records = log.records;  // vectors stay in input order
  const auto vectors =
      extract_features_from_log(std::move(log.records), ads, args.window_s, nullptr, args.jobs);

  auto out = open_output(args.out_path);
  std::size_t actions = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Label label = predict(model, vectors[i]).label;
    if (label == Label::user_action) ++actions;
    out << format_log_line(records[i], label_name(label)) << '\n';
  }
  std::cerr << "classified " << records.size() << " records, " << actions << " user-actions\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::vector<std::string> features_paths;
  std::string out_path;
  bool ig_ranking = false;
  bool learning_curve = false;
  std::size_t folds = 10;
  bool forest = false;
  std::size_t trees = 101;
  std::size_t subset = 0;
  std::size_t min_leaf = 5;
  double min_gain = 1e-4;
  std::uint64_t seed = 1;
  bool no_bootstrap = false;
  unsigned jobs = 0;
};

int run_evaluate(const EvaluateArgs& args) {
  const auto config = to_train_config(args.forest, args.trees, args.subset, args.min_leaf,
                                      args.min_gain, args.seed, args.no_bootstrap);
  std::string text;
  if (args.ig_ranking) {
    if (args.features_paths.size() != 1) {
      throw InputError("--ig needs exactly one --features file");
    }
    auto in = open_input(args.features_paths[0]);
    const auto examples = read_feature_csv(in);
    text = "feature,information_gain_bits\n";
    for (const auto& [feature, ig] : information_gain_ranking(examples)) {
      text += std::string(feature_table()[feature].name) + "," + format_double(ig) + "\n";
    }
    text.pop_back();
  } else if (args.learning_curve) {
    if (args.features_paths.size() < 2) {
      throw InputError("--learning-curve needs at least two --features files (one per group)");
    }
    std::vector<std::vector<FeatureVector>> groups;
    for (const auto& path : args.features_paths) {
      auto in = open_input(path);
      groups.push_back(read_feature_csv(in));
    }
    const auto points = learning_curve(groups, config, args.folds, args.seed, args.jobs);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : points) {
      nlohmann::json entry;
      entry["n_groups"] = p.n_groups;
      entry["cv"] = nlohmann::json::parse(report_to_json(p.cv));
      entry["holdout"] = nlohmann::json::parse(report_to_json(p.holdout));
      j.push_back(std::move(entry));
    }
    text = j.dump(2);
  } else {
    if (args.features_paths.size() != 1) {
      throw InputError("evaluate needs exactly one --features file (or --learning-curve)");
    }
    auto in = open_input(args.features_paths[0]);
    const auto examples = read_feature_csv(in);
    const EvalReport report = cross_validate(examples, config, args.folds, args.seed, args.jobs);
    text = report_to_json(report);
    std::cerr << report_to_table(report);
  }
  if (args.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    auto out = open_output(args.out_path);
    out << text << '\n';
  }
  return kExitOk;
}

struct MatchArgs {
  std::string history_path;
  std::string in_path;
  std::string out_path;
  double tolerance_s = 10.0;
};

int run_match(const MatchArgs& args) {
  auto history_in = open_input(args.history_path);
  const auto history = read_history(history_in);
  auto log = read_log_file(args.in_path, LogSchema{}, true);

  std::vector<HttpRecord> records = log.records;
  sort_records_per_browser(records);
  if (browser_partitions(records).size() > 1) {
    throw InputError("match expects a single-browser trace (history files carry no browser id)");
  }
  MatchReport report;
  const auto labels = match_history(history, records, args.tolerance_s, &report);

  auto out = open_output(args.out_path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << format_log_line(records[i], label_name(labels[i])) << '\n';
  }
  std::cerr << "matched " << report.entries_matched << "/" << report.entries_total
            << " history entries (" << report.chain_matches << " via redirection chains)\n";
  return kExitOk;
}

struct SessionsArgs {
  std::string in_path;
  std::string out_path;
  std::string devices_path;
  double gap_s = kDefaultSessionGapS;
};

int run_sessions(const SessionsArgs& args) {
  auto log = read_log_file(args.in_path, LogSchema::labeled(), false);
  DeviceRules rules = default_device_rules();
  if (!args.devices_path.empty()) {
    auto in = open_input(args.devices_path);
    rules = load_device_rules(in);
  }

  std::vector<HttpRecord> actions;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    if (log.labels[i] == label_name(Label::user_action)) actions.push_back(log.records[i]);
  }
  sort_records_per_browser(actions);

  std::vector<SessionRow> rows;
  for (const auto& [begin, end] : browser_partitions(actions)) {
    const BrowserId browser{actions[begin].household_id, actions[begin].user_agent};
    const DeviceClass device = classify_device(browser.user_agent, rules);
    std::vector<std::int64_t> ts;
    for (std::size_t i = begin; i < end; ++i) ts.push_back(actions[i].timestamp_ms);
    for (const auto& s : segment_sessions(browser, ts, args.gap_s)) rows.push_back({s, device});
  }
  auto out = open_output(args.out_path);
  write_sessions_csv(out, rows);
  std::cerr << "wrote " << rows.size() << " sessions\n";
  return kExitOk;
}

struct GraphsArgs {
  std::string in_path;
  std::string out_dir;
  double filter_threshold = 0.5;
  unsigned jobs = 0;
};

int run_graphs(const GraphsArgs& args) {
  auto log = read_log_file(args.in_path, LogSchema::labeled(), false);

  std::vector<HttpRecord> records = std::move(log.records);
  std::vector<std::string> labels = std::move(log.labels);
  if (args.filter_threshold > 0.0) {
    FilterReport report;
    std::set<std::pair<std::string, std::string>> dropped;
    filter_abnormal_browsers(records, args.filter_threshold, &report);
    for (const auto& r : report.removed) {
      dropped.emplace(r.browser.household_id, r.browser.user_agent);
    }
    if (!dropped.empty()) {
      std::cerr << "filtered " << dropped.size() << " abnormal browsers\n";
      std::vector<HttpRecord> kept_records;
      std::vector<std::string> kept_labels;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!dropped.count({records[i].household_id, records[i].user_agent})) {
          kept_records.push_back(std::move(records[i]));
          kept_labels.push_back(std::move(labels[i]));
        }
      }
      records = std::move(kept_records);
      labels = std::move(kept_labels);
    }
  }

  std::vector<HttpRecord> actions;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (labels[i] == label_name(Label::user_action)) actions.push_back(std::move(records[i]));
  }
  sort_records_per_browser(actions);

  fs::create_directories(args.out_dir);
  {
    auto out = open_output((fs::path(args.out_dir) / "actions.tsv").string());
    for (const auto& r : actions) {
      out << format_log_line(r, label_name(Label::user_action)) << '\n';
    }
  }
  const auto graphs = build_daily_graphs(std::move(actions), args.jobs);
  for (const auto& g : graphs) {
    const std::string name = to_hex16(browser_hash(g.browser)) + "_" + day_string(g.day) + ".graph";
    auto out = open_output((fs::path(args.out_dir) / name).string());
    write_graph(out, g);
  }
  std::cerr << "wrote " << graphs.size() << " graphs\n";
  return kExitOk;
}

struct MetricsArgs {
  std::string graphs_dir;
  std::string out_dir;
  std::string suffixes_path;
  double gap_s = kDefaultSessionGapS;
  unsigned jobs = 0;
};

int run_metrics(const MetricsArgs& args) {
  const auto dir = read_graphs_dir(args.graphs_dir);
  const SuffixList suffixes = load_suffixes_opt(args.suffixes_path);
  fs::create_directories(args.out_dir);
  const auto out_path = [&](const char* name) { return (fs::path(args.out_dir) / name).string(); };

  std::vector<HttpRecord> actions = dir.actions;
  const MetricSuite suite = compute_metric_suite(actions, suffixes, args.gap_s, args.jobs);
  {
    auto out = open_output(out_path("suite.json"));
    out << metric_suite_to_json(suite) << '\n';
  }

  sort_records_per_browser(actions);
  std::vector<double> think_all;
  std::vector<double> idle_all;
  std::vector<double> durations;
  std::vector<double> per_session;
  std::vector<SessionRow> session_rows;
  for (const auto& [begin, end] : browser_partitions(actions)) {
    const BrowserId browser{actions[begin].household_id, actions[begin].user_agent};
    std::vector<std::int64_t> ts;
    for (std::size_t i = begin; i < end; ++i) ts.push_back(actions[i].timestamp_ms);
    const auto thinks = think_times(ts);
    think_all.insert(think_all.end(), thinks.begin(), thinks.end());
    const auto sessions = segment_sessions(browser, ts, args.gap_s);
    const DeviceClass device = classify_device(browser.user_agent, default_device_rules());
    for (const auto& s : sessions) {
      durations.push_back(s.duration_s());
      per_session.push_back(static_cast<double>(s.action_count));
      session_rows.push_back({s, device});
    }
    const auto idles = idle_times(sessions);
    idle_all.insert(idle_all.end(), idles.begin(), idles.end());
  }
  {
    auto out = open_output(out_path("sessions.csv"));
    write_sessions_csv(out, session_rows);
  }
  write_ecdf_csv(out_path("think_time_ecdf.csv"), think_all);
  write_ecdf_csv(out_path("idle_time_ecdf.csv"), idle_all);
  write_ecdf_csv(out_path("session_duration_ecdf.csv"), durations);
  write_ecdf_csv(out_path("actions_per_session_ecdf.csv"), per_session);

  const auto graphs = build_daily_graphs(std::move(actions), args.jobs);
  {
    auto out = open_output(out_path("consumption.csv"));
    out << "household_id,user_agent_hash,day,pages,domains,actions,revisit_ratio\n";
    for (const auto& row : daily_consumption(graphs, suffixes)) {
      out << row.browser.household_id << ',' << to_hex16(fnv1a64(row.browser.user_agent)) << ','
          << day_string(row.day) << ',' << row.pages << ',' << row.domains << ',' << row.actions
          << ',' << format_double(row.revisit_ratio) << '\n';
    }
  }
  {
    auto out = open_output(out_path("paths.csv"));
    out << "household_id,user_agent_hash,day,longest_path_vertices,domains_in_path\n";
    std::vector<double> domains_short, domains_mid, domains_long;
    for (const auto& g : graphs) {
      const auto longest = longest_path_length(g);
      std::vector<std::string> urls;
      for (std::size_t v : longest.witness) urls.push_back(g.vertex_urls()[v]);
      const std::size_t n_domains = urls.empty() ? 0 : domains_in_path(urls, suffixes);
      out << g.browser.household_id << ',' << to_hex16(fnv1a64(g.browser.user_agent)) << ','
          << day_string(g.day) << ',' << longest.length << ',' << n_domains << '\n';
      auto& bucket = longest.length < 10 ? domains_short
                     : longest.length <= 100 ? domains_mid
                                             : domains_long;
      bucket.push_back(static_cast<double>(n_domains));
    }
    // per-length-bucket box-plot rows with 1.5*IQR outliers
    auto tukey_out = open_output(out_path("path_domain_outliers.csv"));
    tukey_out << "path_length_bucket,paths,q1,median,q3,lower_fence,upper_fence,outliers,"
                 "outlier_fraction\n";
    const std::pair<const char*, const std::vector<double>*> buckets[] = {
        {"lt10", &domains_short}, {"10to100", &domains_mid}, {"gt100", &domains_long}};
    for (const auto& [name, values] : buckets) {
      if (values->size() < 4) continue;  // too few paths for quartiles
      const auto t = stats::tukey_outliers(*values);
      tukey_out << name << ',' << values->size() << ',' << format_double(t.q1) << ','
                << format_double(t.median) << ',' << format_double(t.q3) << ','
                << format_double(t.lower_fence) << ',' << format_double(t.upper_fence) << ','
                << t.outliers.size() << ','
                << format_double(static_cast<double>(t.outliers.size()) /
                                 static_cast<double>(values->size()))
                << '\n';
    }
  }
  {
    auto out = open_output(out_path("wcc.csv"));
    out << "household_id,user_agent_hash,day,components,biggest_wcc_ratio\n";
    for (const auto& g : graphs) {
      if (g.vertex_count() == 0) continue;
      const auto partition = wcc_partition(g);
      out << g.browser.household_id << ',' << to_hex16(fnv1a64(g.browser.user_agent)) << ','
          << day_string(g.day) << ',' << partition.size() << ','
          << format_double(biggest_wcc_ratio(g)) << '\n';
    }
  }
  std::cerr << "metrics for " << graphs.size() << " graphs written to " << args.out_dir << '\n';
  return kExitOk;
}

struct PromotersArgs {
  std::string graphs_dir;
  std::string config_path;
  std::string ranking_path;
  std::string fractions_path;
  std::string suffixes_path;
  std::int64_t min_pages = -1;
  unsigned jobs = 0;
};

int run_promoters(const PromotersArgs& args) {
  const auto dir = read_graphs_dir(args.graphs_dir);
  const SuffixList suffixes = load_suffixes_opt(args.suffixes_path);
  PromoterConfig config = load_promoters_opt(args.config_path);
  if (args.min_pages >= 1) config.min_pages_per_graph = static_cast<std::size_t>(args.min_pages);

  const auto graphs = build_daily_graphs(dir.actions, args.jobs);
  if (!args.ranking_path.empty()) {
    auto out = open_output(args.ranking_path);
    out << "domain,promoted_domains,fraction\n";
    for (const auto& r : promoter_ranking(graphs, suffixes)) {
      out << r.domain.label << ',' << r.promoted << ',' << format_double(r.fraction) << '\n';
    }
  }
  if (!args.fractions_path.empty()) {
    const auto table = promoter_fraction_table(graphs, config, suffixes);
    auto out = open_output(args.fractions_path);
    out << "household_id,user_agent_hash,day,direct_se,reachable_se,direct_osn,reachable_osn\n";
    for (const auto& row : table.rows) {
      out << row.browser.household_id << ',' << to_hex16(fnv1a64(row.browser.user_agent)) << ','
          << day_string(row.day) << ',' << format_double(row.fractions.direct_se) << ','
          << format_double(row.fractions.reachable_se) << ','
          << format_double(row.fractions.direct_osn) << ','
          << format_double(row.fractions.reachable_osn) << '\n';
    }
    std::cerr << table.rows.size() << " graphs analyzed, " << table.graphs_filtered
              << " below the page threshold\n";
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string graphs_dir;
  std::string out_path;
  std::string config_path;
  std::string suffixes_path;
  double target = -1.0;
  std::vector<double> checkpoints;
  double gap_s = kDefaultSessionGapS;
  unsigned jobs = 0;
};

int run_simulate(const SimulateArgs& args) {
  const auto dir = read_graphs_dir(args.graphs_dir);
  const SuffixList suffixes = load_suffixes_opt(args.suffixes_path);
  const PromoterConfig config = load_promoters_opt(args.config_path);
  const std::set<Domain> retaining = retaining_domains(config);

  std::vector<double> targets = args.checkpoints;
  if (targets.empty()) {
    if (args.target < 0.0) throw InputError("simulate needs --target or --checkpoints");
    targets.push_back(args.target);
  }
  const auto order = migration_order(std::span<const HttpRecord>(dir.actions), suffixes);

  std::vector<SimulationResult> results;
  for (double target : targets) {
    results.push_back(
        simulate_migration(dir.actions, order, target, retaining, suffixes, args.gap_s, args.jobs));
    const auto& r = results.back();
    std::cerr << "target " << format_double(target) << ": removed "
              << format_double(r.achieved_fraction) << " of actions across " << r.migrated.size()
              << " domains\n";
  }
  const std::string text = simulation_report_json(results);
  if (args.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    auto out = open_output(args.out_path);
    out << text << '\n';
  }
  return kExitOk;
}

struct KsArgs {
  std::string a_path;
  std::string b_path;
  std::string out_path;
  double alpha = 0.05;
};

int run_ks(const KsArgs& args) {
  const auto a = read_sample_file(args.a_path);
  const auto b = read_sample_file(args.b_path);
  const auto result = stats::ks_two_sample(a, b, args.alpha);
  nlohmann::json j;
  j["statistic"] = result.statistic;
  j["p_value"] = result.p_value;
  j["reject"] = result.reject;
  j["alpha"] = args.alpha;
  const std::string text = j.dump(2);
  if (args.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    auto out = open_output(args.out_path);
    out << text << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP log user-action mining and clickstream analysis"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads for parallel stages (0 = hardware)")
      ->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a labeled synthetic trace");
  gen_cmd->add_option("--config", gen.config_path, "Generator config (key = value lines)");
  gen_cmd->add_option("--out", gen.out_path, "Trace output (log format)")->required();
  gen_cmd->add_option("--truth", gen.truth_path, "Truth labels output (line\\tlabel)");
  gen_cmd->add_option("--truth-graphs", gen.truth_graph_dir, "Directory for truth graph edge lists");
  gen_cmd->add_option("--history", gen.history_path, "Browsing-history output (TSV)");
  gen_cmd->add_option("--seed", gen.seed, "Override the config seed");

  FeaturesArgs features;
  auto* features_cmd = app.add_subcommand("features", "Extract the 17 per-request features");
  features_cmd->add_option("--in", features.in_path, "Input trace")->required();
  features_cmd->add_option("--out", features.out_path, "Feature CSV output")->required();
  features_cmd->add_option("--truth", features.truth_path, "Truth labels to attach");
  features_cmd->add_option("--ads", features.ads_path, "Ad blacklist file (one term per line)");
  features_cmd->add_option("--window", features.window_s, "Parent/child linking window, seconds")
      ->capture_default_str();
  features_cmd->add_option("--filter-abnormal", features.filter_threshold,
                           "Drop browsers with missing-referer ratio >= T (0 = off)")
      ->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a decision tree or random forest");
  train_cmd->add_option("--features", train.features_path, "Labeled feature CSV")->required();
  train_cmd->add_option("--model", train.model_path, "Model JSON output")->required();
  train_cmd->add_flag("--forest", train.forest, "Train a random forest instead of a single tree");
  train_cmd->add_option("--trees", train.trees, "Forest size")->capture_default_str();
  train_cmd->add_option("--subset", train.subset, "Features drawn per split (0 = sqrt)")
      ->capture_default_str();
  train_cmd->add_option("--min-leaf", train.min_leaf, "Minimum node size to split")
      ->capture_default_str();
  train_cmd->add_option("--min-gain", train.min_gain, "Minimum information gain to split")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Forest bootstrap/subset seed")->capture_default_str();
  train_cmd->add_flag("--no-bootstrap", train.no_bootstrap, "Train each tree on the full set");

  ClassifyArgs classify;
  auto* classify_cmd = app.add_subcommand("classify", "Label a trace with a trained model");
  classify_cmd->add_option("--model", classify.model_path, "Model JSON")->required();
  classify_cmd->add_option("--in", classify.in_path, "Input trace")->required();
  classify_cmd->add_option("--out", classify.out_path, "Labeled trace output")->required();
  classify_cmd->add_option("--ads", classify.ads_path, "Ad blacklist file");
  classify_cmd->add_option("--window", classify.window_s, "Linking window, seconds")
      ->capture_default_str();

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Cross-validate or trace a learning curve");
  evaluate_cmd->add_option("--features", evaluate.features_paths,
                           "Labeled feature CSV (repeat for --learning-curve groups)")
      ->required();
  evaluate_cmd->add_option("--out", evaluate.out_path, "JSON report output (default stdout)");
  evaluate_cmd->add_flag("--ig", evaluate.ig_ranking,
                         "Print the information-gain ranking instead of cross-validating");
  evaluate_cmd->add_flag("--learning-curve", evaluate.learning_curve,
                         "Vary the number of training groups");
  evaluate_cmd->add_option("--folds", evaluate.folds, "Cross-validation folds")
      ->capture_default_str();
  evaluate_cmd->add_flag("--forest", evaluate.forest, "Evaluate a random forest");
  evaluate_cmd->add_option("--trees", evaluate.trees, "Forest size")->capture_default_str();
  evaluate_cmd->add_option("--subset", evaluate.subset, "Features per split (0 = sqrt)")
      ->capture_default_str();
  evaluate_cmd->add_option("--min-leaf", evaluate.min_leaf, "Minimum node size to split")
      ->capture_default_str();
  evaluate_cmd->add_option("--min-gain", evaluate.min_gain, "Minimum gain to split")
      ->capture_default_str();
  evaluate_cmd->add_option("--seed", evaluate.seed, "Fold shuffling / forest seed")
      ->capture_default_str();
  evaluate_cmd->add_flag("--no-bootstrap", evaluate.no_bootstrap, "Disable bootstrap resampling");

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "Label a trace against a browsing history");
  match_cmd->add_option("--history", match.history_path, "History TSV")->required();
  match_cmd->add_option("--in", match.in_path, "Input trace (single browser)")->required();
  match_cmd->add_option("--out", match.out_path, "Labeled trace output")->required();
  match_cmd->add_option("--tolerance", match.tolerance_s, "Timestamp tolerance, seconds")
      ->capture_default_str();

  SessionsArgs sessions;
  auto* sessions_cmd = app.add_subcommand("sessions", "Segment user-actions into sessions");
  sessions_cmd->add_option("--in", sessions.in_path, "Labeled trace")->required();
  sessions_cmd->add_option("--out", sessions.out_path, "Sessions CSV output")->required();
  sessions_cmd->add_option("--devices", sessions.devices_path, "Device rule file");
  sessions_cmd->add_option("--gap", sessions.gap_s, "Session gap, seconds")->capture_default_str();

  GraphsArgs graphs;
  auto* graphs_cmd = app.add_subcommand("graphs", "Build per-(browser, day) clickstream graphs");
  graphs_cmd->add_option("--in", graphs.in_path, "Labeled trace")->required();
  graphs_cmd->add_option("--out-dir", graphs.out_dir, "Output directory")->required();
  graphs_cmd->add_option("--filter-abnormal", graphs.filter_threshold,
                         "Drop browsers with missing-referer ratio >= T (0 = off)")
      ->capture_default_str();

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Sessions, consumption, path and WCC metrics");
  metrics_cmd->add_option("--graphs", metrics.graphs_dir, "Directory from the graphs subcommand")
      ->required();
  metrics_cmd->add_option("--out-dir", metrics.out_dir, "Output directory")->required();
  metrics_cmd->add_option("--suffixes", metrics.suffixes_path, "Public suffix list file");
  metrics_cmd->add_option("--gap", metrics.gap_s, "Session gap, seconds")->capture_default_str();

  PromotersArgs promoters;
  auto* promoters_cmd = app.add_subcommand("promoters", "Promoter ranking and reachability");
  promoters_cmd->add_option("--graphs", promoters.graphs_dir, "Directory from the graphs subcommand")
      ->required();
  promoters_cmd->add_option("--config", promoters.config_path, "Promoter list config");
  promoters_cmd->add_option("--ranking", promoters.ranking_path, "Ranking CSV output");
  promoters_cmd->add_option("--fractions", promoters.fractions_path, "Per-graph fractions CSV");
  promoters_cmd->add_option("--suffixes", promoters.suffixes_path, "Public suffix list file");
  promoters_cmd->add_option("--min-pages", promoters.min_pages,
                            "Minimum visited pages per graph (default from config)");

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "What-if HTTPS migration sweep");
  simulate_cmd->add_option("--graphs", simulate.graphs_dir, "Directory from the graphs subcommand")
      ->required();
  simulate_cmd->add_option("--target", simulate.target, "Removed user-action fraction in [0,1]");
  simulate_cmd->add_option("--checkpoints", simulate.checkpoints,
                           "Several targets (e.g. 0.15 0.30 0.45)");
  simulate_cmd->add_option("--out", simulate.out_path, "JSON report output (default stdout)");
  simulate_cmd->add_option("--config", simulate.config_path, "Promoter list config");
  simulate_cmd->add_option("--suffixes", simulate.suffixes_path, "Public suffix list file");
  simulate_cmd->add_option("--gap", simulate.gap_s, "Session gap, seconds")->capture_default_str();

  KsArgs ks;
  auto* ks_cmd = app.add_subcommand("ks", "Two-sample Kolmogorov-Smirnov test");
  ks_cmd->add_option("--a", ks.a_path, "Sample A (one value per line)")->required();
  ks_cmd->add_option("--b", ks.b_path, "Sample B (one value per line)")->required();
  ks_cmd->add_option("--alpha", ks.alpha, "Significance level")->capture_default_str();
  ks_cmd->add_option("--out", ks.out_path, "JSON output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  features.jobs = jobs;
  train.jobs = jobs;
  classify.jobs = jobs;
  evaluate.jobs = jobs;
  graphs.jobs = jobs;
  metrics.jobs = jobs;
  promoters.jobs = jobs;
  simulate.jobs = jobs;

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (features_cmd->parsed()) return run_features(features);
    if (train_cmd->parsed()) return run_train(train);
    if (classify_cmd->parsed()) return run_classify(classify);
    if (evaluate_cmd->parsed()) return run_evaluate(evaluate);
    if (match_cmd->parsed()) return run_match(match);
    if (sessions_cmd->parsed()) return run_sessions(sessions);
    if (graphs_cmd->parsed()) return run_graphs(graphs);
    if (metrics_cmd->parsed()) return run_metrics(metrics);
    if (promoters_cmd->parsed()) return run_promoters(promoters);
    if (simulate_cmd->parsed()) return run_simulate(simulate);
    if (ks_cmd->parsed()) return run_ks(ks);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ModelSchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
