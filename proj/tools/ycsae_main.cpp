// Command-line front end: train, gen-data, encode, inspect.
//
// Exit codes: 0 success, 1 usage/validation error, 2 I/O or file-format error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ycsae/ycsae.hpp"

namespace {

using ycsae::Pattern;
using ycsae::TrainConfig;

std::string pattern_to_string(const Pattern& p) {
  std::string s;
  s.reserve(p.size());
  for (double bit : p) s.push_back(bit == 0.0 ? '0' : '1');
  return s;
}

Pattern parse_bit_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("input must be a non-empty string over {0,1}");
  Pattern p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '0') {
      p[i] = 0.0;
    } else if (s[i] == '1') {
      p[i] = 1.0;
    } else {
      throw std::invalid_argument(std::string("input contains invalid character '") +
                                  s[i] + "'; expected only 0 and 1");
    }
  }
  return p;
}

struct TrainFlags {
  TrainConfig cfg;
  std::string dataset_path;
  std::string out_dir = ".";
  std::string offspring_init = "inherit";
  CLI::Option* length_opt = nullptr;
  CLI::Option* eps0_opt = nullptr;
  CLI::Option* sigma0_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* dataset_opt = nullptr;
};

void add_train_flags(CLI::App& cmd, TrainFlags& f) {
  f.length_opt = cmd.add_option("--length", f.cfg.input_width, "input pattern length l");
  cmd.add_option("--hidden", f.cfg.hidden_width, "hidden layer width H");
  cmd.add_option("--pop-size", f.cfg.pop_size, "rulebase capacity N");
  cmd.add_option("--beta", f.cfg.beta, "learning rate, in (0,1]");
  cmd.add_option("--v", f.cfg.v, "fitness exponent, > 0");
  cmd.add_option("--theta-ga", f.cfg.theta_ga, "EA period threshold in cycles");
  cmd.add_option("--mu", f.cfg.mu, "per-gene mutation probability");
  cmd.add_option("--m0", f.cfg.m0, "mutation half-range");
  f.eps0_opt = cmd.add_option("--eps0", f.cfg.eps0, "initial error estimate (default l/2)");
  f.sigma0_opt =
      cmd.add_option("--sigma0", f.cfg.sigma0, "initial niche-size estimate (default N/2)");
  cmd.add_option("--w0", f.cfg.w0, "weight init half-range");
  f.noise_opt = cmd.add_option("--noise", f.cfg.noise_rate,
                               "bit-flip probability for generated input");
  cmd.add_option("--cycles", f.cfg.cycles, "system cycles per run");
  cmd.add_option("--sample-interval", f.cfg.sample_interval, "cycles between metric rows");
  cmd.add_option("--runs", f.cfg.runs, "independent runs to average");
  cmd.add_option("--seed", f.cfg.master_seed, "master seed; run i uses seed+i");
  f.dataset_opt = cmd.add_option("--dataset", f.dataset_path,
                                 "train on patterns from this file instead of "
                                 "generated noisy input");
  cmd.add_option("--out-dir", f.out_dir, "directory for metrics and model files");
  cmd.add_option("--offspring-init", f.offspring_init,
                 "offspring estimates: inherit parent's or reset to eps0/sigma0")
      ->check(CLI::IsMember({"inherit", "reset"}));
}

int cmd_train(TrainFlags& f) {
  if (*f.dataset_opt && *f.noise_opt) {
    throw std::invalid_argument(
        "--dataset conflicts with --noise: file patterns are used as-is");
  }
  f.cfg.offspring_init = f.offspring_init == "reset" ? ycsae::OffspringInit::reset
                                                     : ycsae::OffspringInit::inherit;

  std::optional<std::vector<Pattern>> dataset;
  if (*f.dataset_opt) {
    dataset = ycsae::load_dataset(f.dataset_path);
    const std::size_t file_width = dataset->front().size();
    if (*f.length_opt && f.cfg.input_width != file_width) {
      throw std::invalid_argument("--length " + std::to_string(f.cfg.input_width) +
                                  " does not match dataset pattern length " +
                                  std::to_string(file_width));
    }
    f.cfg.input_width = file_width;
  }
  // Derived defaults follow --length / --pop-size unless given explicitly.
  if (!*f.eps0_opt) f.cfg.eps0 = static_cast<double>(f.cfg.input_width) / 2.0;
  if (!*f.sigma0_opt) f.cfg.sigma0 = static_cast<double>(f.cfg.pop_size) / 2.0;
  f.cfg.validate();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(f.out_dir, ec);
  if (ec) throw ycsae::FileError(f.out_dir + ": cannot create directory");

  const ycsae::ExperimentResult result =
      ycsae::run_experiment(f.cfg, dataset ? &*dataset : nullptr);

  for (std::size_t i = 0; i < result.per_run.size(); ++i) {
    const std::string metrics_path =
        (fs::path(f.out_dir) / ("metrics_run_" + std::to_string(i) + ".csv")).string();
    std::ofstream out(metrics_path);
    if (!out) throw ycsae::FileError(metrics_path + ": cannot open for writing");
    ycsae::write_metrics_csv(out, result.per_run[i], std::to_string(i));
    if (!out) throw ycsae::FileError(metrics_path + ": write failed");

    const std::string model_path =
        (fs::path(f.out_dir) / ("model_run_" + std::to_string(i) + ".txt")).string();
    ycsae::save_model(result.rulebases[i], f.cfg, model_path);

    const ycsae::MetricsRow& last = result.per_run[i].rows.back();
    std::cout << "run " << i << ": final window_match_error_per_bit = "
              << ycsae::format_real(last.window_match_error_per_bit)
              << " (covers=" << ycsae::format_real(last.covers_cum)
              << ", ea_events=" << ycsae::format_real(last.ea_events_cum) << ")\n";
  }

  const std::string avg_path = (fs::path(f.out_dir) / "metrics_avg.csv").string();
  std::ofstream avg_out(avg_path);
  if (!avg_out) throw ycsae::FileError(avg_path + ": cannot open for writing");
  ycsae::write_metrics_csv(avg_out, result.averaged, "avg");
  if (!avg_out) throw ycsae::FileError(avg_path + ": write failed");

  std::cout << "average: final window_match_error_per_bit = "
            << ycsae::format_real(result.averaged.rows.back().window_match_error_per_bit)
            << "\n";
  return 0;
}

struct GenDataFlags {
  std::size_t length = 11;
  std::size_t count = 1000;
  double noise = 0.1;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen_data(const GenDataFlags& f) {
  const ycsae::DatasetSpec spec{f.length, f.noise};
  spec.validate();
  if (f.count == 0) throw std::invalid_argument("count must be >= 1");
  ycsae::Rng rng(f.seed);
  std::vector<Pattern> patterns;
  patterns.reserve(f.count);
  for (std::size_t i = 0; i < f.count; ++i) patterns.push_back(ycsae::sample_pattern(spec, rng));
  ycsae::save_dataset(f.out, patterns);
  return 0;
}

struct EncodeFlags {
  std::string model_path;
  std::string input;
  std::string dataset_path;
  CLI::Option* input_opt = nullptr;
  CLI::Option* dataset_opt = nullptr;
};

int cmd_encode(const EncodeFlags& f) {
  if (*f.input_opt && *f.dataset_opt) {
    throw std::invalid_argument("--input conflicts with --dataset: give exactly one");
  }
  if (!*f.input_opt && !*f.dataset_opt) {
    throw std::invalid_argument("encode needs --input or --dataset");
  }
  const ycsae::LoadedModel model = ycsae::load_model(f.model_path);

  std::vector<Pattern> inputs;
  if (*f.input_opt) {
    inputs.push_back(parse_bit_string(f.input));
  } else {
    inputs = ycsae::load_dataset(f.dataset_path);
  }
  for (const Pattern& p : inputs) {
    if (p.size() != model.input_width) {
      throw std::invalid_argument("input length " + std::to_string(p.size()) +
                                  " does not match model input width " +
                                  std::to_string(model.input_width));
    }
  }

  std::cout << "input,rule_id";
  for (std::size_t j = 1; j <= model.hidden_width; ++j) std::cout << ",h" << j;
  std::cout << '\n';
  for (const Pattern& p : inputs) {
    std::cout << pattern_to_string(p) << ',';
    const auto best = ycsae::best_encode(model.rulebase, p);
    if (best) {
      std::cout << best->rule_id;
      for (double h : best->hidden) std::cout << ',' << ycsae::format_real(h);
    } else {
      std::cout << "none";
      for (std::size_t j = 0; j < model.hidden_width; ++j) std::cout << ',';
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_inspect(const std::string& model_path) {
  const ycsae::LoadedModel model = ycsae::load_model(model_path);
  const auto& rules = model.rulebase.rules;
  double eps_min = rules.front().error, eps_max = eps_min, eps_sum = 0.0;
  double sig_min = rules.front().niche, sig_max = sig_min, sig_sum = 0.0;
  std::uint64_t ts_max = 0;
  for (const ycsae::Rule& r : rules) {
    eps_min = std::min(eps_min, r.error);
    eps_max = std::max(eps_max, r.error);
    eps_sum += r.error;
    sig_min = std::min(sig_min, r.niche);
    sig_max = std::max(sig_max, r.niche);
    sig_sum += r.niche;
    ts_max = std::max(ts_max, r.ga_timestamp);
  }
  const double n = static_cast<double>(rules.size());
  std::cout << "model: " << model_path << '\n'
            << "input_width: " << model.input_width << '\n'
            << "hidden_width: " << model.hidden_width << '\n'
            << "rules: " << rules.size() << '\n'
            << "params_per_rule: "
            << ycsae::NetworkGenome::param_count(model.input_width, model.hidden_width)
            << '\n'
            << "error: min=" << ycsae::format_real(eps_min)
            << " mean=" << ycsae::format_real(eps_sum / n)
            << " max=" << ycsae::format_real(eps_max) << '\n'
            << "niche: min=" << ycsae::format_real(sig_min)
            << " mean=" << ycsae::format_real(sig_sum / n)
            << " max=" << ycsae::format_real(sig_max) << '\n'
            << "last_ea_cycle: " << ts_max << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"YCSAE: an evolved population of small neural autoencoders"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  TrainFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "run the training experiment and write metrics and models");
  add_train_flags(*train_cmd, train_flags);

  GenDataFlags gen_flags;
  CLI::App* gen_cmd =
      app.add_subcommand("gen-data", "write a noisy binary dataset file");
  gen_cmd->add_option("--length", gen_flags.length, "pattern length");
  gen_cmd->add_option("--count", gen_flags.count, "number of patterns");
  gen_cmd->add_option("--noise", gen_flags.noise, "bit-flip probability");
  gen_cmd->add_option("--seed", gen_flags.seed, "rng seed");
  gen_cmd->add_option("--out", gen_flags.out, "output path")->required();

  EncodeFlags encode_flags;
  CLI::App* encode_cmd = app.add_subcommand(
      "encode", "print the best-rule hidden encodings for inputs");
  encode_cmd->add_option("--model", encode_flags.model_path, "model file")->required();
  encode_flags.input_opt =
      encode_cmd->add_option("--input", encode_flags.input, "one pattern as a 0/1 string");
  encode_flags.dataset_opt =
      encode_cmd->add_option("--dataset", encode_flags.dataset_path, "patterns file");

  std::string inspect_model;
  CLI::App* inspect_cmd = app.add_subcommand("inspect", "print a model summary");
  inspect_cmd->add_option("--model", inspect_model, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_flags);
    if (gen_cmd->parsed()) return cmd_gen_data(gen_flags);
    if (encode_cmd->parsed()) return cmd_encode(encode_flags);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect_model);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ycsae::FileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
