#include "cstream/generator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "cstream/config.hpp"
#include "cstream/sessions.hpp"
#include "cstream/util.hpp"

namespace cstream {

namespace {

constexpr std::int64_t kDayMs = 86'400'000;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("gen config: ") + what);
}

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void GenConfig::validate() const {
  require(n_browsers >= 1, "n_browsers must be >= 1");
  require(n_days >= 1, "n_days must be >= 1");
  require(day_index_from_string(start_day).has_value(), "start_day must be YYYY-MM-DD");
  const double mix = device_mix_pc + device_mix_smartphone + device_mix_tablet;
  require(device_mix_pc >= 0 && device_mix_smartphone >= 0 && device_mix_tablet >= 0 &&
              std::abs(mix - 1.0) < 1e-6,
          "device_mix fractions must be non-negative and sum to 1");
  require(sessions_per_browser_mean >= 1.0, "sessions_per_browser_mean must be >= 1");
  require(actions_per_session_mean >= 1.0, "actions_per_session_mean must be >= 1");
  require(children_per_action_mean >= 0.0, "children_per_action_mean must be >= 0");
  require(child_delay_median_s > 0 && max_child_delay_s > 0, "child delays must be positive");
  require(think_time_median_s > 0 && max_think_time_s > 0, "think times must be positive");
  require(idle_extra_median_s >= 0, "idle_extra_median_s must be >= 0");
  require(is_prob(promoter_visit_probability), "promoter_visit_probability outside [0,1]");
  require(promoter_path_mean >= 1.0, "promoter_path_mean must be >= 1");
  require(is_prob(redirect_chain_probability), "redirect_chain_probability outside [0,1]");
  require(is_prob(ad_fraction), "ad_fraction outside [0,1]");
  require(is_prob(iframe_probability), "iframe_probability outside [0,1]");
  require(iframe_children_mean >= 0.0, "iframe_children_mean must be >= 0");
  require(is_prob(zero_children_action_fraction), "zero_children_action_fraction outside [0,1]");
  require(n_content_domains >= 1, "n_content_domains must be >= 1");
  require(pages_per_domain >= 1, "pages_per_domain must be >= 1");
  require(history_jitter_s >= 0, "history_jitter_s must be >= 0");
  require(!promoters.empty() || promoter_visit_probability == 0.0,
          "promoter_visit_probability needs a non-empty promoter list");
  for (const auto& d : https_retain) {
    require(https_domains.count(d) > 0, "https_retain must be a subset of https_domains");
  }
}

GenConfig load_gen_config(std::istream& in) {
  const KeyValueFile kv = KeyValueFile::parse(in);
  GenConfig c;
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.seed)));
  c.n_browsers = static_cast<std::size_t>(kv.get_int("n_browsers", static_cast<std::int64_t>(c.n_browsers)));
  c.n_days = static_cast<std::size_t>(kv.get_int("n_days", static_cast<std::int64_t>(c.n_days)));
  c.start_day = kv.get_string("start_day", c.start_day);
  if (kv.has("device_mix")) {
    const auto mix = kv.get_list("device_mix");
    if (mix.size() != 3) throw std::invalid_argument("gen config: device_mix needs 'pc,smartphone,tablet'");
    const auto pc = parse_double(mix[0]);
    const auto sp = parse_double(mix[1]);
    const auto tb = parse_double(mix[2]);
    if (!pc || !sp || !tb) throw std::invalid_argument("gen config: device_mix needs three numbers");
    c.device_mix_pc = *pc;
    c.device_mix_smartphone = *sp;
    c.device_mix_tablet = *tb;
  }
  c.sessions_per_browser_mean = kv.get_double("sessions_per_browser_mean", c.sessions_per_browser_mean);
  c.actions_per_session_mean = kv.get_double("actions_per_session_mean", c.actions_per_session_mean);
  c.children_per_action_mean = kv.get_double("children_per_action_mean", c.children_per_action_mean);
  c.child_delay_median_s = kv.get_double("child_delay_median_s", c.child_delay_median_s);
  c.child_delay_sigma = kv.get_double("child_delay_sigma", c.child_delay_sigma);
  c.max_child_delay_s = kv.get_double("max_child_delay_s", c.max_child_delay_s);
  c.think_time_median_s = kv.get_double("think_time_median_s", c.think_time_median_s);
  c.think_time_sigma = kv.get_double("think_time_sigma", c.think_time_sigma);
  c.max_think_time_s = kv.get_double("max_think_time_s", c.max_think_time_s);
  c.idle_extra_median_s = kv.get_double("idle_extra_median_s", c.idle_extra_median_s);
  c.idle_extra_sigma = kv.get_double("idle_extra_sigma", c.idle_extra_sigma);
  c.promoter_visit_probability = kv.get_double("promoter_visit_probability", c.promoter_visit_probability);
  c.promoter_path_mean = kv.get_double("promoter_path_mean", c.promoter_path_mean);
  c.redirect_chain_probability = kv.get_double("redirect_chain_probability", c.redirect_chain_probability);
  c.ad_fraction = kv.get_double("ad_fraction", c.ad_fraction);
  c.iframe_probability = kv.get_double("iframe_probability", c.iframe_probability);
  c.iframe_children_mean = kv.get_double("iframe_children_mean", c.iframe_children_mean);
  c.zero_children_action_fraction =
      kv.get_double("zero_children_action_fraction", c.zero_children_action_fraction);
  c.n_content_domains = static_cast<std::size_t>(kv.get_int("n_content_domains", static_cast<std::int64_t>(c.n_content_domains)));
  c.pages_per_domain = static_cast<std::size_t>(kv.get_int("pages_per_domain", static_cast<std::int64_t>(c.pages_per_domain)));
  c.history_jitter_s = kv.get_double("history_jitter_s", c.history_jitter_s);
  if (kv.has("promoters")) c.promoters = kv.get_list("promoters");
  for (const auto& d : kv.get_list("https_domains")) c.https_domains.insert(to_lower(d));
  for (const auto& d : kv.get_list("https_retain")) c.https_retain.insert(to_lower(d));

  const auto unknown = kv.unused_keys();
  if (!unknown.empty()) {
    std::string msg = "gen config: unknown keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  c.validate();
  return c;
}

namespace {

struct EmitRec {
  HttpRecord rec;
  Label label = Label::automatic;
  std::size_t browser = 0;
  std::size_t seq = 0;
};

const char* kContentStems[] = {"news",  "shop",  "video", "blog",   "forum",
                               "wiki",  "sport", "meteo", "recipe", "travel"};
const char* kContentTlds[] = {".com", ".net", ".org"};
const char* kAssetExts[] = {"js", "css", "png", "jpg", "gif", "json"};
const char* kAssetTypes[] = {"application/javascript", "text/css", "image/png",
                             "image/jpeg",             "image/gif", "application/json"};

class BrowserSim {
 public:
  BrowserSim(const GenConfig& config, std::size_t index, std::uint64_t seed,
             std::vector<EmitRec>& out, std::map<std::pair<std::size_t, std::int64_t>, TruthGraph>& truth,
             std::map<BrowserId, std::vector<HistoryEntry>>& history, std::size_t& hidden_actions,
             std::size_t& emitted_actions)
      : cfg_(config),
        index_(index),
        rng_(seed),
        out_(out),
        truth_(truth),
        history_(history),
        hidden_actions_(hidden_actions),
        emitted_actions_(emitted_actions) {
    id_.household_id = "H" + std::to_string(1000 + index / 3);
    id_.user_agent = make_user_agent();
  }

  void run() {
    const std::int64_t start_ms = *day_index_from_string(cfg_.start_day) * kDayMs;
    const std::int64_t horizon = start_ms + static_cast<std::int64_t>(cfg_.n_days) * kDayMs;
    std::int64_t t = start_ms + uniform_ms(0, kDayMs / 2);
    const std::size_t n_sessions = geometric_min1(cfg_.sessions_per_browser_mean);
    for (std::size_t s = 0; s < n_sessions && t < horizon; ++s) {
      t = run_session(t);
      const std::int64_t gap_ms = static_cast<std::int64_t>(kDefaultSessionGapS * 1000.0);
      t += gap_ms + 1000 + llround_s(lognormal(cfg_.idle_extra_median_s, cfg_.idle_extra_sigma));
    }
  }

 private:
  std::string make_user_agent() {
    const double u = uniform01();
    const std::string tag = " Gen/" + std::to_string(index_);
    if (u < cfg_.device_mix_pc) {
      return "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) "
             "Chrome/51.0" + tag;
    }
    if (u < cfg_.device_mix_pc + cfg_.device_mix_smartphone) {
      if (index_ % 2 == 0) {
        return "Mozilla/5.0 (iPhone; CPU iPhone OS 9_3_2 like Mac OS X) AppleWebKit/601.1 "
               "Mobile/13F69 Safari/601.1" + tag;
      }
      return "Mozilla/5.0 (Linux; Android 6.0.1; SM-G920F) AppleWebKit/537.36 Mobile "
             "Safari/537.36" + tag;
    }
    if (index_ % 2 == 0) {
      return "Mozilla/5.0 (iPad; CPU OS 9_3_2 like Mac OS X) AppleWebKit/601.1 Safari/601.1" + tag;
    }
    return "Mozilla/5.0 (Linux; Android 5.1.1; SM-T530) AppleWebKit/537.36 Safari/537.36" + tag;
  }

  // --- random helpers ------------------------------------------------------

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  bool chance(double p) { return p > 0.0 && uniform01() < p; }

  std::int64_t uniform_ms(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi - 1)(rng_);
  }

  std::size_t geometric_mean(double mean) {
    if (mean <= 0.0) return 0;
    std::geometric_distribution<long long> dist(1.0 / (mean + 1.0));
    return static_cast<std::size_t>(dist(rng_));
  }

  std::size_t geometric_min1(double mean) { return 1 + geometric_mean(mean - 1.0); }

  double lognormal(double median, double sigma) {
    if (median <= 0.0) return 0.0;
    return std::lognormal_distribution<double>(std::log(median), sigma)(rng_);
  }

  double lognormal_clamped(double median, double sigma, double lo, double hi) {
    return std::clamp(lognormal(median, sigma), lo, hi);
  }

  static std::int64_t llround_s(double seconds) {
    return static_cast<std::int64_t>(std::llround(seconds * 1000.0));
  }

  // --- web universe --------------------------------------------------------

  std::string domain_name(std::size_t i) const {
    const std::size_t n_stems = std::size(kContentStems);
    return std::string(kContentStems[i % n_stems]) + std::to_string(i) + kContentTlds[i % 3];
  }

  std::string page_url(std::size_t domain_idx, std::size_t page_idx) const {
    std::string url = "http://www." + domain_name(domain_idx) + "/";
    switch (page_idx % 3) {
      case 0: url += "p" + std::to_string(page_idx); break;
      case 1: url += "article/" + std::to_string(page_idx); break;
      default: url += "cat/" + std::to_string(page_idx / 5) + "/item" + std::to_string(page_idx);
    }
    return url;
  }

  std::size_t random_domain() { return static_cast<std::size_t>(uniform_ms(0, static_cast<std::int64_t>(cfg_.n_content_domains))); }
  std::size_t random_page() { return static_cast<std::size_t>(uniform_ms(0, static_cast<std::int64_t>(cfg_.pages_per_domain))); }

  std::string registrable(const std::string& url) const {
    return extract_domain(url, SuffixList{}).label;
  }

  bool is_https(const std::string& url) const { return cfg_.https_domains.count(registrable(url)) > 0; }
  bool retains_referer(const std::string& url) const {
    return cfg_.https_retain.count(registrable(url)) > 0;
  }

  // --- emission ------------------------------------------------------------

  void push(HttpRecord rec, Label label) {
    out_.push_back({std::move(rec), label, index_, seq_++});
  }

  void record_truth_action(std::int64_t ts, const std::string& url,
                           const std::optional<std::string>& referer) {
    const auto key = std::make_pair(index_, day_index_utc(ts));
    auto& g = truth_[key];
    g.browser = id_;
    g.day = key.second;
    const std::string page = normalize_url(url).normalized_url;
    ++g.visit_count[page];
    if (referer) {
      const std::string source = normalize_url(*referer).normalized_url;
      g.visit_count.try_emplace(source, 0);
      if (source != page) g.edges.emplace(source, page);
    }
  }

  void add_history(std::int64_t ts, const std::string& url, const char* transition) {
    HistoryEntry e;
    const std::int64_t jitter = llround_s(cfg_.history_jitter_s);
    e.timestamp_ms = std::max<std::int64_t>(1, ts + (jitter ? uniform_ms(-jitter, jitter + 1) : 0));
    e.url = url;
    e.transition = transition;
    history_[id_].push_back(std::move(e));
  }

  std::optional<std::string> visible_referer(const std::optional<std::string>& referer) const {
    if (!referer) return std::nullopt;
    if (is_https(*referer) && !retains_referer(*referer)) return std::nullopt;
    return referer;
  }

  // Pages need a base set of objects to render at all; the geometric tail
  // sits on top of that floor. Iframes stay small.
  std::size_t page_child_count() {
    const double mean = cfg_.children_per_action_mean;
    if (mean < 5.0) return geometric_mean(mean);
    return 5 + geometric_mean(mean - 5.0);
  }

  std::size_t iframe_child_count() {
    return std::min<std::size_t>(geometric_mean(cfg_.iframe_children_mean), 4);
  }

  void emit_children(const std::string& page, std::int64_t page_ts, std::size_t n,
                     bool allow_iframe) {
    // iframe content starts loading only after the frame itself arrives
    const double delay_median =
        allow_iframe ? cfg_.child_delay_median_s : 3.0 * cfg_.child_delay_median_s;
    for (std::size_t k = 0; k < n; ++k) {
      const std::int64_t ts =
          page_ts + llround_s(lognormal_clamped(delay_median, cfg_.child_delay_sigma, 0.01,
                                                cfg_.max_child_delay_s));
      HttpRecord rec;
      rec.timestamp_ms = ts;
      rec.household_id = id_.household_id;
      rec.user_agent = id_.user_agent;
      rec.referer = page;

      if (chance(cfg_.ad_fraction)) {
        rec.url = "http://ads.adnet" + std::to_string(uniform_ms(0, 4)) + ".com/b/" +
                  std::to_string(index_) + "x" + std::to_string(next_id_++);
        rec.content_type = "image/gif";
        rec.content_length = 43 + uniform_ms(0, 64);
        rec.status_code = chance(0.1) ? 204 : 200;
        push(std::move(rec), Label::automatic);
        continue;
      }
      if (allow_iframe && chance(cfg_.iframe_probability)) {
        rec.url = "http://static.cdnbox" + std::to_string(uniform_ms(0, 6)) + ".net/frame/" +
                  std::to_string(index_) + "x" + std::to_string(next_id_++);
        rec.content_type = "text/html";
        rec.content_length = static_cast<std::int64_t>(lognormal(8000.0, 0.8));
        rec.status_code = 200;
        const std::string frame_url = rec.url;
        push(std::move(rec), Label::automatic);
        emit_children(frame_url, ts, iframe_child_count(), false);
        continue;
      }
      const auto ext = static_cast<std::size_t>(uniform_ms(0, static_cast<std::int64_t>(std::size(kAssetExts))));
      rec.url = "http://static.cdnbox" + std::to_string(uniform_ms(0, 6)) + ".net/o/" +
                std::to_string(index_) + "x" + std::to_string(next_id_++) + "." + kAssetExts[ext];
      rec.content_type = kAssetTypes[ext];
      rec.content_length = static_cast<std::int64_t>(lognormal(3000.0, 1.0));
      rec.status_code = chance(0.06) ? 304 : 200;
      push(std::move(rec), Label::automatic);
    }
  }

  // Emits one user-action (with optional redirect hop and fan-out) and
  // returns the timestamp of the action record itself.
  std::int64_t emit_action(std::int64_t t, const std::string& url,
                           std::optional<std::string> referer, const char* transition) {
    const bool hidden = is_https(url);
    std::optional<std::string> effective = std::move(referer);
    std::int64_t action_ts = t;

    if (!hidden && chance(cfg_.redirect_chain_probability)) {
      const std::string hop_url = "http://go.redir" + std::to_string(index_ % 4) + ".net/u/" +
                                  std::to_string(index_) + "x" + std::to_string(next_id_++);
      HttpRecord hop;
      hop.timestamp_ms = t;
      hop.household_id = id_.household_id;
      hop.user_agent = id_.user_agent;
      hop.url = hop_url;
      hop.referer = visible_referer(effective);
      hop.status_code = chance(0.5) ? 301 : 302;
      push(std::move(hop), Label::automatic);
      effective = hop_url;
      action_ts = t + uniform_ms(100, 400);
      transition = "redirect";
    }

    record_truth_action(action_ts, url, effective);
    add_history(action_ts, url, transition);

    if (hidden) {
      ++hidden_actions_;
      return action_ts;
    }

    HttpRecord rec;
    rec.timestamp_ms = action_ts;
    rec.household_id = id_.household_id;
    rec.user_agent = id_.user_agent;
    rec.url = url;
    rec.referer = visible_referer(effective);
    rec.content_type = "text/html";
    rec.content_length = static_cast<std::int64_t>(lognormal(25000.0, 0.7));
    rec.status_code = 200;
    push(std::move(rec), Label::user_action);
    ++emitted_actions_;

    if (!chance(cfg_.zero_children_action_fraction)) {
      emit_children(url, action_ts, page_child_count(), true);
    }
    return action_ts;
  }

  // Returns the timestamp of the last action of the session.
  std::int64_t run_session(std::int64_t t) {
    const std::size_t n_actions = geometric_min1(cfg_.actions_per_session_mean);
    std::string current_page;
    std::size_t current_domain = 0;
    std::size_t promoter_path_left = 0;

    for (std::size_t a = 0; a < n_actions; ++a) {
      if (a > 0) {
        t += llround_s(lognormal_clamped(cfg_.think_time_median_s, cfg_.think_time_sigma, 1.0,
                                         cfg_.max_think_time_s));
      }

      enum class Nav { root, follow, cross } nav = Nav::follow;
      if (a == 0) {
        nav = Nav::root;
      } else if (promoter_path_left > 0) {
        nav = Nav::follow;
        --promoter_path_left;
      } else {
        const double u = uniform01();
        nav = u < 0.8 ? Nav::follow : (u < 0.9 ? Nav::cross : Nav::root);
      }

      if (nav == Nav::root && chance(cfg_.promoter_visit_probability)) {
        const auto& promoter =
            cfg_.promoters[static_cast<std::size_t>(uniform_ms(0, static_cast<std::int64_t>(cfg_.promoters.size())))];
        const std::string search_url = "http://" + promoter + "/search";
        t = emit_action(t, search_url, std::nullopt, "typed");
        current_page = search_url;
        current_domain = random_domain();
        promoter_path_left = geometric_min1(cfg_.promoter_path_mean);
        continue;
      }
      if (nav == Nav::root) {
        current_domain = random_domain();
        const std::string url = page_url(current_domain, random_page());
        t = emit_action(t, url, std::nullopt, "typed");
        current_page = url;
        continue;
      }
      if (nav == Nav::cross) current_domain = random_domain();
      const std::string url = page_url(current_domain, random_page());
      t = emit_action(t, url, current_page, "link");
      current_page = url;
    }
    return t;
  }

  const GenConfig& cfg_;
  std::size_t index_;
  BrowserId id_;
  std::mt19937_64 rng_;
  std::vector<EmitRec>& out_;
  std::map<std::pair<std::size_t, std::int64_t>, TruthGraph>& truth_;
  std::map<BrowserId, std::vector<HistoryEntry>>& history_;
  std::size_t& hidden_actions_;
  std::size_t& emitted_actions_;
  std::size_t seq_ = 0;
  std::size_t next_id_ = 0;
};

}  // namespace

GeneratedTrace generate(const GenConfig& config) {
  config.validate();

  std::vector<EmitRec> emitted;
  std::map<std::pair<std::size_t, std::int64_t>, TruthGraph> truth;
  GeneratedTrace trace;

  std::uint64_t seed_state = config.seed;
  for (std::size_t b = 0; b < config.n_browsers; ++b) {
    const std::uint64_t browser_seed = splitmix64(seed_state);
    BrowserSim sim(config, b, browser_seed, emitted, truth, trace.history,
                   trace.hidden_user_actions, trace.emitted_user_actions);
    sim.run();
  }

  std::sort(emitted.begin(), emitted.end(), [](const EmitRec& a, const EmitRec& b) {
    return std::tie(a.rec.timestamp_ms, a.browser, a.seq) <
           std::tie(b.rec.timestamp_ms, b.browser, b.seq);
  });
  trace.records.reserve(emitted.size());
  trace.labels.reserve(emitted.size());
  for (auto& e : emitted) {
    trace.records.push_back(std::move(e.rec));
    trace.labels.push_back(e.label);
  }
  for (auto& [_, g] : truth) trace.truth_graphs.push_back(std::move(g));
  std::sort(trace.truth_graphs.begin(), trace.truth_graphs.end(),
            [](const TruthGraph& a, const TruthGraph& b) {
              return std::tie(a.browser, a.day) < std::tie(b.browser, b.day);
            });
  for (auto& [_, entries] : trace.history) {
    std::sort(entries.begin(), entries.end(), [](const HistoryEntry& a, const HistoryEntry& b) {
      return std::tie(a.timestamp_ms, a.url) < std::tie(b.timestamp_ms, b.url);
    });
  }
  return trace;
}

void write_trace(std::ostream& out, const GeneratedTrace& trace) {
  for (const auto& rec : trace.records) {
    out << format_log_line(rec) << '\n';
  }
}

void write_truth_labels(std::ostream& out, const GeneratedTrace& trace) {
  std::string line;
  for (std::size_t i = 0; i < trace.labels.size(); ++i) {
    line.clear();
    line += format_i64(static_cast<std::int64_t>(i + 1));
    line.push_back('\t');
    line += std::string(label_name(trace.labels[i]));
    line.push_back('\n');
    out << line;
  }
}

void write_truth_graph(std::ostream& out, const TruthGraph& graph) {
  out << "# " << to_hex16(browser_hash(graph.browser)) << ' ' << day_string(graph.day) << '\n';
  std::set<std::string> in_edges;
  for (const auto& [src, dst] : graph.edges) {
    out << src << '\t' << dst << '\n';
    in_edges.insert(src);
    in_edges.insert(dst);
  }
  for (const auto& [url, _] : graph.visit_count) {
    if (!in_edges.count(url)) out << url << '\n';
  }
}

}  // namespace cstream
