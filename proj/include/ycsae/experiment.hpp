#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ycsae/data.hpp"
#include "ycsae/ea.hpp"
#include "ycsae/rulebase.hpp"

namespace ycsae {

/// Full experiment parameterization. Defaults are the noisy-binary
/// experiment's values for l = 11.
struct TrainConfig {
  std::size_t pop_size = 1000;       // N
  std::size_t input_width = 11;      // l
  std::size_t hidden_width = 5;      // H
  double w0 = 1.0;                   // init half-range for weights and biases
  double eps0 = 5.5;                 // initial error estimate, l/2
  double sigma0 = 500.0;             // initial niche-size estimate, N/2
  double beta = 0.2;
  double v = 50.0;
  double theta_ga = 25.0;
  double mu = 0.05;
  double m0 = 0.1;
  double noise_rate = 0.1;           // generated-input bit-flip probability
  std::uint64_t cycles = 50000;
  std::uint64_t sample_interval = 100;
  std::size_t runs = 10;
  std::uint64_t master_seed = 1;
  OffspringInit offspring_init = OffspringInit::inherit;

  LearningParams learning() const { return {beta, v, theta_ga, mu, m0}; }

  void validate() const {
    if (pop_size == 0) throw std::invalid_argument("pop-size must be >= 1");
    if (input_width == 0) throw std::invalid_argument("length must be >= 1");
    if (hidden_width == 0) throw std::invalid_argument("hidden must be >= 1");
    if (!(w0 > 0.0)) throw std::invalid_argument("w0 must be > 0");
    if (!(eps0 >= 0.0)) throw std::invalid_argument("eps0 must be >= 0");
    if (!(sigma0 >= 0.0)) throw std::invalid_argument("sigma0 must be >= 0");
    learning().validate();
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
      throw std::invalid_argument("noise must be in [0,1]");
    }
    if (sample_interval == 0) throw std::invalid_argument("sample-interval must be >= 1");
    if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  }
};

/// One sampled point of a run. Window metrics are means over the
/// sample_interval cycles ending at `cycle`; the cumulative counters are
/// stored as reals so multi-run averages fit the same type.
struct MetricsRow {
  std::uint64_t cycle = 0;
  double mean_rule_error = 0.0;           // mean eps over all N rules
  double window_match_error = 0.0;        // mean per-presentation error signal
  double window_match_error_per_bit = 0.0;  // the former divided by sqrt(l)
  double mean_match_size = 0.0;
  double covers_cum = 0.0;
  double ea_events_cum = 0.0;
};

struct MetricsTimeline {
  TrainConfig config;
  std::vector<MetricsRow> rows;
};

struct StepInfo {
  bool covered = false;
  bool ea_fired = false;
  std::size_t match_size = 0;
  double signal = 0.0;  // match-set mean reconstruction error this cycle
};

/// One training run: owns the rulebase, the rng stream and the metric
/// accumulators. step() executes one system cycle: draw input, match,
/// cover if nothing matched, update the match set, then maybe run the EA.
class Trainer {
 public:
  Trainer(const TrainConfig& cfg, std::uint64_t run_seed,
          const std::vector<Pattern>* dataset = nullptr)
      : cfg_(cfg), rng_(run_seed), dataset_(dataset) {
    cfg_.validate();
    if (dataset_) {
      if (dataset_->empty()) throw std::invalid_argument("dataset is empty");
      if (dataset_->front().size() != cfg_.input_width) {
        throw std::invalid_argument("dataset pattern length " +
                                    std::to_string(dataset_->front().size()) +
                                    " does not match length " +
                                    std::to_string(cfg_.input_width));
      }
    }
    rb_ = init_rulebase(cfg_.pop_size, cfg_.input_width, cfg_.hidden_width, cfg_.w0,
                        cfg_.eps0, cfg_.sigma0, rng_);
    emit_row();  // initial snapshot at cycle 0
  }

  StepInfo step() {
    ++cycle_;
    StepInfo info;
    draw_input();
    MatchSet ms = build_match_set(rb_, input_);
    if (ms.empty()) {
      cover(rb_, input_, cycle_, cfg_.eps0, cfg_.sigma0, cfg_.w0, rng_);
      ++covers_;
      info.covered = true;
      ms = build_match_set(rb_, input_);
    }
    info.signal = update_match_set(rb_, ms, cfg_.beta);
    info.match_size = ms.size();
    window_error_sum_ += info.signal;
    window_size_sum_ += static_cast<double>(ms.size());
    if (ea_should_fire(rb_, ms, cycle_, cfg_.theta_ga)) {
      run_ea(rb_, ms, cycle_, cfg_.learning(), rng_, cfg_.offspring_init, cfg_.eps0,
             cfg_.sigma0);
      ++ea_events_;
      info.ea_fired = true;
    }
    if (cycle_ % cfg_.sample_interval == 0) emit_row();
    return info;
  }

  std::uint64_t cycle() const { return cycle_; }
  std::uint64_t covers() const { return covers_; }
  std::uint64_t ea_events() const { return ea_events_; }
  const Rulebase& rulebase() const { return rb_; }
  Rulebase& rulebase() { return rb_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }
  std::vector<MetricsRow>& rows() { return rows_; }

 private:
  void draw_input() {
    if (dataset_) {
      const std::size_t idx =
          std::uniform_int_distribution<std::size_t>(0, dataset_->size() - 1)(rng_);
      input_ = (*dataset_)[idx];
    } else {
      sample_pattern_into(DatasetSpec{cfg_.input_width, cfg_.noise_rate}, rng_, input_);
    }
  }

  void emit_row() {
    const std::uint64_t window = cycle_ - last_row_cycle_;
    MetricsRow row;
    row.cycle = cycle_;
    double eps_sum = 0.0;
    for (const Rule& r : rb_.rules) eps_sum += r.error;
    row.mean_rule_error = eps_sum / static_cast<double>(rb_.size());
    row.window_match_error =
        window == 0 ? 0.0 : window_error_sum_ / static_cast<double>(window);
    row.window_match_error_per_bit =
        row.window_match_error / std::sqrt(static_cast<double>(cfg_.input_width));
    row.mean_match_size =
        window == 0 ? 0.0 : window_size_sum_ / static_cast<double>(window);
    row.covers_cum = static_cast<double>(covers_);
    row.ea_events_cum = static_cast<double>(ea_events_);
    rows_.push_back(row);
    window_error_sum_ = 0.0;
    window_size_sum_ = 0.0;
    last_row_cycle_ = cycle_;
  }

  TrainConfig cfg_;
  Rng rng_;
  const std::vector<Pattern>* dataset_;
  Rulebase rb_;
  Pattern input_;
  std::uint64_t cycle_ = 0;
  std::uint64_t covers_ = 0;
  std::uint64_t ea_events_ = 0;
  std::uint64_t last_row_cycle_ = 0;
  double window_error_sum_ = 0.0;
  double window_size_sum_ = 0.0;
  std::vector<MetricsRow> rows_;
};

struct TrainResult {
  MetricsTimeline timeline;
  Rulebase rulebase;
};

inline TrainResult train(const TrainConfig& cfg, std::uint64_t run_seed,
                         const std::vector<Pattern>* dataset = nullptr) {
  Trainer trainer(cfg, run_seed, dataset);
  for (std::uint64_t t = 0; t < cfg.cycles; ++t) trainer.step();
  return {MetricsTimeline{cfg, std::move(trainer.rows())}, std::move(trainer.rulebase())};
}

/// Element-wise mean of per-run rows. All timelines must share the same
/// sampling grid.
inline MetricsTimeline average_timelines(const std::vector<MetricsTimeline>& runs) {
  if (runs.empty()) throw std::invalid_argument("nothing to average");
  MetricsTimeline avg;
  avg.config = runs.front().config;
  avg.rows = runs.front().rows;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].rows.size() != avg.rows.size()) {
      throw std::invalid_argument("timelines differ in row count");
    }
    for (std::size_t i = 0; i < avg.rows.size(); ++i) {
      if (runs[r].rows[i].cycle != avg.rows[i].cycle) {
        throw std::invalid_argument("timelines differ in sampling cycles");
      }
      avg.rows[i].mean_rule_error += runs[r].rows[i].mean_rule_error;
      avg.rows[i].window_match_error += runs[r].rows[i].window_match_error;
      avg.rows[i].window_match_error_per_bit += runs[r].rows[i].window_match_error_per_bit;
      avg.rows[i].mean_match_size += runs[r].rows[i].mean_match_size;
      avg.rows[i].covers_cum += runs[r].rows[i].covers_cum;
      avg.rows[i].ea_events_cum += runs[r].rows[i].ea_events_cum;
    }
  }
  const double n = static_cast<double>(runs.size());
  for (MetricsRow& row : avg.rows) {
    row.mean_rule_error /= n;
    row.window_match_error /= n;
    row.window_match_error_per_bit /= n;
    row.mean_match_size /= n;
    row.covers_cum /= n;
    row.ea_events_cum /= n;
  }
  return avg;
}

struct ExperimentResult {
  std::vector<MetricsTimeline> per_run;
  MetricsTimeline averaged;
  std::vector<Rulebase> rulebases;  // final rulebase of each run
};

/// `runs` independent train() calls with run seeds master_seed + run index,
/// then the element-wise average. Runs execute concurrently; each owns its
/// rng stream, so the result does not depend on scheduling.
inline ExperimentResult run_experiment(const TrainConfig& cfg,
                                       const std::vector<Pattern>* dataset = nullptr) {
  cfg.validate();
  std::vector<TrainResult> results(cfg.runs);
  if (cfg.runs > 1) {
    std::vector<std::future<TrainResult>> futures;
    futures.reserve(cfg.runs);
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      futures.push_back(std::async(std::launch::async, [&cfg, dataset, i] {
        return train(cfg, cfg.master_seed + i, dataset);
      }));
    }
    for (std::size_t i = 0; i < cfg.runs; ++i) results[i] = futures[i].get();
  } else {
    results[0] = train(cfg, cfg.master_seed, dataset);
  }
  ExperimentResult out;
  out.per_run.reserve(cfg.runs);
  out.rulebases.reserve(cfg.runs);
  for (TrainResult& r : results) {
    out.per_run.push_back(std::move(r.timeline));
    out.rulebases.push_back(std::move(r.rulebase));
  }
  out.averaged = average_timelines(out.per_run);
  return out;
}

/// Shortest text that round-trips an IEEE double (17 significant digits).
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr std::string_view kMetricsCsvHeader =
    "run,cycle,mean_rule_error,window_match_error,window_match_error_per_bit,"
    "mean_match_size,covers_cum,ea_events_cum";

/// One row per sample; `run_label` is the run index, or "avg" for the
/// averaged timeline.
inline void write_metrics_csv(std::ostream& out, const MetricsTimeline& timeline,
                              std::string_view run_label) {
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRow& row : timeline.rows) {
    out << run_label << ',' << row.cycle << ',' << format_real(row.mean_rule_error)
        << ',' << format_real(row.window_match_error) << ','
        << format_real(row.window_match_error_per_bit) << ','
        << format_real(row.mean_match_size) << ',' << format_real(row.covers_cum)
        << ',' << format_real(row.ea_events_cum) << '\n';
  }
}

inline constexpr int kModelFormatVersion = 1;

/// Text model format. Header "ycsae 1 <l> <H> <N>", then one line per rule:
/// id, error, niche, ga_timestamp, then every genome parameter in layout
/// order, space-separated, reals with 17 significant digits.
inline void write_model(std::ostream& out, const Rulebase& rb, std::size_t input_width,
                        std::size_t hidden_width) {
  out << "ycsae " << kModelFormatVersion << ' ' << input_width << ' ' << hidden_width
      << ' ' << rb.size() << '\n';
  for (const Rule& rule : rb.rules) {
    out << rule.id << ' ' << format_real(rule.error) << ' ' << format_real(rule.niche)
        << ' ' << rule.ga_timestamp;
    for (double p : rule.genome.params) out << ' ' << format_real(p);
    out << '\n';
  }
}

inline void save_model(const Rulebase& rb, const TrainConfig& cfg,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError(path + ": cannot open for writing");
  write_model(out, rb, cfg.input_width, cfg.hidden_width);
  if (!out) throw FileError(path + ": write failed");
}

struct LoadedModel {
  Rulebase rulebase;
  std::size_t input_width = 0;
  std::size_t hidden_width = 0;
};

inline LoadedModel read_model(std::istream& in, const std::string& name) {
  auto fail = [&name](std::size_t line_no, const std::string& what) -> FileError {
    return FileError(name + ": line " + std::to_string(line_no) + ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header");
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  std::size_t l = 0, h = 0, n = 0;
  if (!(header >> magic) || magic != "ycsae") throw fail(1, "not a ycsae model file");
  if (!(header >> version >> l >> h >> n)) throw fail(1, "malformed header");
  if (version != kModelFormatVersion) {
    throw fail(1, "unsupported model version " + std::to_string(version));
  }
  if (l == 0 || h == 0 || n == 0) throw fail(1, "invalid dimensions");
  std::string extra;
  if (header >> extra) throw fail(1, "unexpected trailing fields in header");

  const std::size_t expected_params = NetworkGenome::param_count(l, h);
  LoadedModel model;
  model.input_width = l;
  model.hidden_width = h;
  model.rulebase.rules.reserve(n);
  std::uint64_t max_id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line_no = i + 2;
    if (!std::getline(in, line)) throw fail(line_no, "truncated file: expected " +
                                                         std::to_string(n) + " rules");
    std::istringstream fields(line);
    Rule rule;
    rule.genome.input_width = l;
    rule.genome.hidden_width = h;
    rule.genome.params.resize(expected_params);
    if (!(fields >> rule.id >> rule.error >> rule.niche >> rule.ga_timestamp)) {
      throw fail(line_no, "malformed rule fields");
    }
    for (std::size_t p = 0; p < expected_params; ++p) {
      if (!(fields >> rule.genome.params[p])) {
        throw fail(line_no, "expected " + std::to_string(expected_params) +
                                " genome parameters");
      }
    }
    if (fields >> extra) {
      throw fail(line_no, "expected " + std::to_string(expected_params) +
                              " genome parameters, found more");
    }
    if (!(std::isfinite(rule.error) && rule.error >= 0.0 &&
          std::isfinite(rule.niche) && rule.niche >= 0.0)) {
      throw fail(line_no, "error and niche estimates must be finite and >= 0");
    }
    max_id = std::max(max_id, rule.id);
    model.rulebase.rules.push_back(std::move(rule));
  }
  while (std::getline(in, line)) {
    if (!line.empty()) throw fail(n + 2, "trailing content after " +
                                             std::to_string(n) + " rules");
  }
  model.rulebase.next_id = max_id + 1;
  return model;
}

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path + ": cannot open for reading");
  return read_model(in, path);
}

struct BestEncode {
  std::uint64_t rule_id = 0;
  std::vector<double> hidden;
};

/// The lowest-error matching rule's id and encoding (ties break to the
/// lowest id); nullopt when nothing matches.
inline std::optional<BestEncode> best_encode(const Rulebase& rb,
                                             std::span<const double> x) {
  std::vector<double> hidden;
  const Rule* best = nullptr;
  for (const Rule& rule : rb.rules) {
    if (match_activation(rule.genome, x, hidden) <= 0.5) continue;
    if (best == nullptr || rule.error < best->error ||
        (rule.error == best->error && rule.id < best->id)) {
      best = &rule;
    }
  }
  if (best == nullptr) return std::nullopt;
  return BestEncode{best->id, encode(best->genome, x)};
}

}  // namespace ycsae
