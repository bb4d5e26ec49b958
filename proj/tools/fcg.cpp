// Command-line front end: generate, train, predict, evaluate, complexity.

#include <CLI11.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcg/config.hpp"
#include "fcg/library_io.hpp"
#include "fcg/model/bundle.hpp"
#include "fcg/report.hpp"
#include "fcg/sax.hpp"
#include "fcg/twin.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code(const char* cls) {
  const std::string c = cls;
  if (c == "config") return 2;
  if (c == "io") return 3;
  if (c == "version_mismatch") return 4;
  if (c == "missing_part") return 5;
  if (c == "checksum" || c == "truncated" || c == "malformed") return 6;
  if (c == "shape") return 7;
  if (c == "domain" || c == "non_propagating" || c == "undefined_direction" || c == "divergence" ||
      c == "degenerate_target" || c == "poisoned_update")
    return 8;
  return 1;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

fcg::ToolkitConfig effective_config(const Common& c) {
  fcg::ToolkitConfig cfg = c.config.empty() ? fcg::ToolkitConfig{} : fcg::load_config(c.config);
  if (c.seed) cfg.library.seed = *c.seed;
  return cfg;
}

int cmd_generate(const Common& c, std::optional<std::size_t> n_slices, bool no_slicing,
                 std::optional<std::size_t> n_samples) {
  fcg::ToolkitConfig cfg = effective_config(c);
  if (n_slices) {
    if (*n_slices < 1) throw fcg::ConfigError("slicing.n_slices", "must be at least 1");
    cfg.n_slices = *n_slices;
  }
  if (no_slicing) cfg.n_slices = 1;
  if (n_samples) {
    if (*n_samples < 5) throw fcg::ConfigError("library.n_samples", "must be at least 5");
    cfg.library.n_samples = *n_samples;
  }
  fcg::Library lib = fcg::generate_library(cfg.library.n_samples, cfg.library_specs(), cfg.library.seed);
  lib.config_hash = fcg::config_hash(cfg);
  fcg::save_library(lib, c.out);
  double life = 0.0;
  for (const auto& s : lib.samples) life += s.path.total_life;
  std::cout << "samples " << lib.samples.size() << " (train " << lib.train_ids.size() << ", test "
            << lib.test_ids.size() << ")\nrare_fraction " << lib.rare_fraction() << "\nmean_life_cycles "
            << life / static_cast<double>(lib.samples.size()) << "\nconfig_hash " << lib.config_hash << "\n";
  return 0;
}

int cmd_train(const Common& c, const std::string& library, std::optional<double> lambda, bool no_reweight) {
  fcg::ToolkitConfig cfg = effective_config(c);
  if (lambda) {
    if (!(*lambda >= 0.0)) throw fcg::ConfigError("training.lambda", "must be non-negative");
    cfg.training.lambda = *lambda;
  }
  if (no_reweight) cfg.training.lambda = 0.0;
  const fcg::Library lib = fcg::load_library(library);
  if (lib.specs.resolution != cfg.library.resolution)
    throw fcg::ShapeError("library resolution differs from the configured resolution");
  fcg::model::ModelBundle b = fcg::model::train_bundle(lib, cfg.training, cfg.library.seed);
  b.config_hash = fcg::config_hash(cfg);
  fcg::model::save_bundle(b, c.out);
  std::cout << "vae_loss " << b.vae_trace.front() << " -> " << b.vae_trace.back() << "\nseq_loss "
            << b.seq_trace.front() << " -> " << b.seq_trace.back() << "\nlife_loss " << b.life_trace.front() << " -> "
            << b.life_trace.back() << "\nrare_training_samples " << b.n_rare_train << "\nconfig_hash " << b.config_hash
            << "\n";
  return 0;
}

int cmd_predict(const Common& c, const std::string& bundle_dir, const std::string& library, std::string sample_id,
                double t_obs) {
  if (!(t_obs > 0.0 && t_obs <= 1.0)) throw fcg::ConfigError("--t-obs", "must lie in (0, 1]");
  const fcg::model::ModelBundle b = fcg::model::load_bundle(bundle_dir);
  const fcg::Library lib = fcg::load_library(library);
  if (sample_id.empty()) sample_id = lib.test_ids.empty() ? lib.samples.front().sample_id : lib.test_ids.front();
  const fcg::LibrarySample& s = lib.sample(sample_id);
  const auto eval = fcg::evaluate_sample(b, s, lib.specs, {t_obs}, 100);
  const fcg::ReplayRow& row = eval.rows.front();
  const fcg::Prediction& p = eval.predictions.front();

  std::vector<fcg::Point2> truth{lib.specs.plate.notch_mouth()};
  truth.insert(truth.end(), s.path.points.begin(), s.path.points.end());
  std::vector<fcg::Point2> observed{lib.specs.plate.notch_mouth()};
  observed.insert(observed.end(), s.path.points.begin(),
                  s.path.points.begin() + static_cast<std::ptrdiff_t>(row.step_index + 1));

  fcg::io::ensure_directory(c.out);
  const fs::path out(c.out);
  fcg::io::write_file(out / "prediction.csv",
                      fcg::report::path_csv({{"truth", truth}, {"observed", observed}, {"predicted", p.path}},
                                            b.config_hash));
  std::ostringstream summary;
  summary << "sample_id,t_obs_fraction,step_index,rmse,ssim,life_truth,life_pred,config_hash\n"
          << row.sample_id << ',' << fcg::report::num(row.t_obs_fraction) << ',' << row.step_index << ','
          << fcg::report::num(row.rmse) << ',' << fcg::report::num(row.ssim) << ','
          << fcg::report::num(row.life_truth) << ',' << fcg::report::num(row.life_pred) << ',' << b.config_hash
          << '\n';
  fcg::io::write_file(out / "prediction_summary.csv", summary.str());
  fcg::io::write_file(out / "overlay.svg",
                      fcg::report::overlay_svg(lib.specs.plate,
                                               {{{"truth", "#999999", ""}, truth},
                                                {{"predicted", "#d62728", "6,4"}, p.path},
                                                {{"observed", "#000000", ""}, observed}},
                                               "sample " + sample_id + ", t_obs " + fcg::report::num(t_obs),
                                               b.config_hash));
  std::cout << "sample " << sample_id << "\nstep_index " << row.step_index << "\nrmse_mm " << row.rmse * 1e3
            << "\nssim " << row.ssim << "\nlife_truth " << row.life_truth << "\nlife_pred " << row.life_pred << "\n";
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& bundle_dir, const std::string& library,
                 const std::vector<double>& t_obs) {
  fcg::ToolkitConfig cfg = effective_config(c);
  if (!t_obs.empty()) cfg.evaluation.t_obs = t_obs;
  for (double f : cfg.evaluation.t_obs)
    if (!(f > 0.0 && f <= 1.0)) throw fcg::ConfigError("evaluation.t_obs", "fractions must lie in (0, 1]");
  const fcg::model::ModelBundle b = fcg::model::load_bundle(bundle_dir);
  const fcg::Library lib = fcg::load_library(library);
  const auto rows = fcg::run_replay(b, lib, cfg.evaluation.t_obs, cfg.evaluation.n_resample);

  fcg::io::ensure_directory(c.out);
  const fs::path out(c.out);
  fcg::io::write_file(out / "replay.csv", fcg::report::replay_csv(rows, b.config_hash));
  using fcg::ReplayRow;
  const auto rmse_mm = [](const ReplayRow& r) { return r.rmse * 1e3; };
  const auto ssim = [](const ReplayRow& r) { return r.ssim; };
  const auto acc = [](const ReplayRow& r) { return r.accuracy; };
  fcg::io::write_file(out / "ssim.svg",
                      fcg::report::curves_svg({{"all", "#1f77b4", fcg::report::mean_by_fraction(rows, ssim)},
                                               {"rare", "#d62728", fcg::report::mean_by_fraction(rows, ssim, true)}},
                                              "mean SSIM vs observed fraction", "t_obs", "SSIM", b.config_hash));
  fcg::io::write_file(out / "rmse.svg",
                      fcg::report::curves_svg({{"all", "#1f77b4", fcg::report::mean_by_fraction(rows, rmse_mm)},
                                               {"rare", "#d62728", fcg::report::mean_by_fraction(rows, rmse_mm, true)}},
                                              "mean path RMSE vs observed fraction", "t_obs", "RMSE (mm)",
                                              b.config_hash));
  fcg::io::write_file(out / "accuracy.svg",
                      fcg::report::curves_svg({{"all", "#1f77b4", fcg::report::mean_by_fraction(rows, acc)}},
                                              "mean life accuracy vs observed fraction", "t_obs", "accuracy",
                                              b.config_hash));
  std::cout << "rows " << rows.size() << "\n";
  for (const auto& [f, v] : fcg::report::mean_by_fraction(rows, ssim))
    std::cout << "t_obs " << f << " ssim " << v << "\n";
  for (const auto& [f, v] : fcg::report::mean_by_fraction(rows, rmse_mm))
    std::cout << "t_obs " << f << " rmse_mm " << v << "\n";
  return 0;
}

/// Reads the first numeric column of a CSV; non-numeric lines (headers) are skipped.
std::vector<double> read_profile(const fs::path& p) {
  std::istringstream in(fcg::io::read_text(p));
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    const std::string cell = line.substr(0, line.find(','));
    if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const double x = std::stod(cell, &used);
      v.push_back(x);
    } catch (const std::exception&) {
      if (!v.empty()) throw fcg::ShapeError("profile: non-numeric value '" + cell + "'");
    }
  }
  if (v.empty()) throw fcg::ShapeError("profile: no numeric values in " + p.string());
  return v;
}

int cmd_complexity(const std::string& profile, std::size_t w, std::size_t l) {
  const auto series = read_profile(profile);
  if (w < 1 || w > series.size()) throw fcg::ConfigError("-w", "word length must lie in [1, series length]");
  const auto word = fcg::sax_discretize(fcg::paa(series, w), l);
  const auto cx = fcg::data_complexity(w, l);
  std::cout << "word " << word.str() << "\n";
  if (cx.count)
    std::cout << "complexity " << *cx.count << "\n";
  else
    std::cout << "complexity 10^" << cx.log10 << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fatigue crack growth toolkit: library generation, surrogate training and digital-twin replay"};
  app.require_subcommand(1);

  Common common;
  std::optional<std::size_t> n_slices, n_samples;
  std::optional<double> lambda;
  bool no_slicing = false, no_reweight = false;
  std::string library, bundle, sample, profile;
  double t_obs = 0.5;
  std::vector<double> t_obs_grid;
  std::size_t w = 8, l = 10;

  const auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", common.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Seed for all randomness (overrides library.seed)");
    auto* o = sub->add_option("--out", common.out, "Output directory");
    if (needs_out) o->required();
  };

  auto* gen = app.add_subcommand("generate", "Simulate a crack library");
  add_common(gen, true);
  gen->add_option("--n-slices", n_slices, "Number of load slices (overrides slicing.n_slices)");
  gen->add_option("--n-samples", n_samples, "Number of samples (overrides library.n_samples)");
  gen->add_flag("--no-slicing", no_slicing, "One load slice for the whole plate (ablation)");

  auto* train = app.add_subcommand("train", "Train the VAE, seq2seq and life models");
  add_common(train, true);
  train->add_option("--library", library, "Library directory")->required();
  train->add_option("--lambda", lambda, "Rare-sample enrichment factor (overrides training.lambda)");
  train->add_flag("--no-reweight", no_reweight, "Train with lambda = 0 (ablation)");

  auto* pred = app.add_subcommand("predict", "Predict one sample's crack path and remaining life");
  add_common(pred, true);
  pred->add_option("--bundle", bundle, "Model bundle directory")->required();
  pred->add_option("--library", library, "Library directory")->required();
  pred->add_option("--sample", sample, "Sample id (default: first test sample)");
  pred->add_option("--t-obs", t_obs, "Observed fraction of the sample's frames");

  auto* eval = app.add_subcommand("evaluate", "Replay the test split and write metrics");
  add_common(eval, true);
  eval->add_option("--bundle", bundle, "Model bundle directory")->required();
  eval->add_option("--library", library, "Library directory")->required();
  eval->add_option("--t-obs", t_obs_grid, "Observed fractions (overrides evaluation.t_obs)")->delimiter(',');

  auto* cx = app.add_subcommand("complexity", "SAX word and data complexity of a load profile");
  cx->add_option("--profile", profile, "CSV with the profile in its first column")->required();
  cx->add_option("-w,--word-length", w, "PAA word length");
  cx->add_option("-l,--alphabet", l, "SAX alphabet size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(common, n_slices, no_slicing, n_samples);
    if (*train) return cmd_train(common, library, lambda, no_reweight);
    if (*pred) return cmd_predict(common, bundle, library, sample, t_obs);
    if (*eval) return cmd_evaluate(common, bundle, library, t_obs_grid);
    if (*cx) return cmd_complexity(profile, w, l);
  } catch (const fcg::ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  } catch (const fcg::Error& e) {
    std::cerr << "error[" << e.error_class() << "]: " << e.what() << "\n";
    return exit_code(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
