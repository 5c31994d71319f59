#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "embfair/errors.hpp"
#include "embfair/experiment.hpp"
#include "embfair/gender_geometry.hpp"

namespace fs = std::filesystem;
using namespace embfair;

namespace {

struct CliOptions {
  ExperimentConfig cfg;
  std::string mode_name = "none";
  std::string filter_name = "all";
  int bins = 40;
  std::string output_embeddings;
  SyntheticCorpusSpec synth;
};

void add_io_options(CLI::App* app, CliOptions& o, bool need_dataset) {
  app->add_option("--embeddings", o.cfg.embeddings_path, "GloVe-format embedding file")->required();
  app->add_option("--dim", o.cfg.dim, "embedding dimension")->required();
  app->add_option("--defining", o.cfg.defining_pairs_path, "defining pair list (JSON)")->required();
  app->add_option("--equalize", o.cfg.equalize_pairs_path, "equalize pair list (JSON)")->required();
  app->add_option("--gender-words", o.cfg.gender_words_path, "gender word list (JSON)")->required();
  auto* ds = app->add_option("--dataset", o.cfg.dataset_path, "biography dataset (JSON lines)");
  if (need_dataset) ds->required();
  app->add_option("--out", o.cfg.output_dir, "output directory");
  app->add_option("--seed", o.cfg.seed, "root random seed");
  app->add_option("--k", o.cfg.k, "gender subspace dimension");
}

void add_train_options(CLI::App* app, TrainConfig& t) {
  app->add_option("--lr", t.learning_rate, "learning rate");
  app->add_option("--batch-size", t.batch_size, "mini-batch size");
  app->add_option("--epochs", t.epochs, "training epochs");
  app->add_option("--hidden", t.hidden, "hidden layer width");
  app->add_option("--momentum", t.momentum, "momentum coefficient");
  app->add_option("--patience", t.patience, "early-stop patience (dev accuracy)");
  app->add_option("--probe-lr", t.probe_learning_rate, "probe learning rate");
  app->add_option("--probe-epochs", t.probe_epochs, "probe training epochs");
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory: " + dir);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << content;
}

void write_run_outputs(const RunResult& r, const TrainConfig& train, const std::string& dir,
                       const std::string& prefix) {
  save_model(r.model, train, to_string(r.mode), dir + "/" + prefix + "model.json");
  write_predictions_csv(r.predictions, dir + "/" + prefix + "predictions.csv");
  write_report_csv(r.report, dir + "/" + prefix + "fairness.csv");
  nlohmann::json j;
  j["mode"] = to_string(r.mode);
  j["accuracy"] = r.report.accuracy;
  j["mean_abs_tpr_gap"] = r.report.mean_abs_tpr_gap;
  j["mean_abs_tnr_gap"] = r.report.mean_abs_tnr_gap;
  j["undefined_gap_count"] = r.report.undefined_gap_count;
  j["probe_accuracy"] = r.probe_accuracy;
  write_text(dir + "/" + prefix + "metrics.json", j.dump(1) + "\n");
}

int cmd_debias(const CliOptions& o) {
  ensure_out_dir(o.cfg.output_dir);
  ExperimentInputs in = load_inputs(o.cfg);
  DebiasMode mode = debias_mode_from_string(o.mode_name);
  GenderSubspace B = compute_gender_subspace(in.embeddings, in.defining, o.cfg.k);
  TransformReport rep;
  EmbeddingSet out = apply_debias(in, mode, B, &rep);
  std::string target = o.output_embeddings.empty()
                           ? o.cfg.output_dir + "/debiased.txt"
                           : o.output_embeddings;
  save_embeddings(out, target);
  write_text(o.cfg.output_dir + "/transform_report.json", rep.to_json() + "\n");

  double max_comp = 0.0;
  for (int i = 0; i < out.size(); ++i) {
    max_comp = std::max(max_comp, std::abs(out.matrix.row(i).dot(B.direction())));
  }
  std::cout << "mode=" << to_string(mode) << " words=" << out.size()
            << " max|gender component|=" << max_comp
            << " oov=" << rep.oov_words << " skipped=" << rep.skipped_words.size() << "\n";
  return 0;
}

int cmd_run(const CliOptions& o) {
  ensure_out_dir(o.cfg.output_dir);
  ExperimentInputs in = load_inputs(o.cfg);
  DebiasMode mode = debias_mode_from_string(o.mode_name);
  RunResult r = run_pipeline(in, mode, o.cfg.train, o.cfg.seed, o.cfg.k);
  write_run_outputs(r, o.cfg.train, o.cfg.output_dir, "");
  std::cout << "mode=" << to_string(mode) << " accuracy=" << r.report.accuracy
            << " tpr_gap=" << r.report.mean_abs_tpr_gap
            << " tnr_gap=" << r.report.mean_abs_tnr_gap
            << " probe_accuracy=" << r.probe_accuracy << "\n";
  return 0;
}

int cmd_ablation(const CliOptions& o) {
  ensure_out_dir(o.cfg.output_dir);
  ExperimentInputs in = load_inputs(o.cfg);
  const DebiasMode modes[] = {DebiasMode::none, DebiasMode::strong,
                              DebiasMode::project_only, DebiasMode::equalize_only};
  std::string csv = "mode,accuracy,tpr_gap,tnr_gap\n";
  char buf[128];
  for (DebiasMode mode : modes) {
    RunResult r = run_pipeline(in, mode, o.cfg.train, o.cfg.seed, o.cfg.k);
    write_run_outputs(r, o.cfg.train, o.cfg.output_dir, to_string(mode) + "_");
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f\n", to_string(mode).c_str(),
                  r.report.accuracy, r.report.mean_abs_tpr_gap, r.report.mean_abs_tnr_gap);
    csv += buf;
    std::cout << buf;
  }
  write_text(o.cfg.output_dir + "/ablation.csv", csv);
  return 0;
}

int cmd_gender_component(const CliOptions& o) {
  ensure_out_dir(o.cfg.output_dir);
  ExperimentInputs in = load_inputs(o.cfg);
  TokenFilter filter = token_filter_from_string(o.filter_name);
  GenderSubspace B = compute_gender_subspace(in.embeddings, in.defining, o.cfg.k);
  auto stats = gender_component_distribution(in.embeddings, in.bios, B, filter,
                                             in.gender_words, o.bins);
  std::string stem = o.cfg.output_dir + "/gender_component_" + to_string(filter);
  write_component_csv(stats, stem + ".csv");
  write_component_json(stats, stem + ".json");
  std::cout << "filter=" << to_string(filter) << " mean_female=" << stats.mean_female
            << " mean_male=" << stats.mean_male << " excluded=" << stats.excluded << "\n";
  return 0;
}

int cmd_summarize(const CliOptions& o) {
  auto bios = load_dataset(o.cfg.dataset_path);
  auto summary = summarize(bios);
  if (!o.cfg.output_dir.empty()) {
    ensure_out_dir(o.cfg.output_dir);
    write_summary_csv(summary, o.cfg.output_dir + "/summary.csv");
  }
  std::cout << "occupation,female,male,frac_female\n";
  for (const auto& [occ, c] : summary.per_occupation) {
    std::cout << occ << ',' << c.female << ',' << c.male << ',' << c.frac_female() << "\n";
  }
  return 0;
}

int cmd_synth(const CliOptions& o) {
  ensure_out_dir(o.cfg.output_dir);
  SyntheticCorpus c = generate_synthetic(o.synth);
  save_embeddings(c.embeddings, o.cfg.output_dir + "/embeddings.txt");
  save_dataset(c.bios, o.cfg.output_dir + "/dataset.jsonl");
  save_word_pairs(c.defining, o.cfg.output_dir + "/defining_pairs.json");
  save_word_pairs(c.equalize, o.cfg.output_dir + "/equalize_pairs.json");
  save_gender_words(c.gender_words, o.cfg.output_dir + "/gender_words.json");
  std::cout << "wrote " << c.embeddings.size() << " vectors and " << c.bios.size()
            << " biographies to " << o.cfg.output_dir << "\n";
  return 0;
}

void emit_error(const char* type, const std::exception& ex) {
  nlohmann::json j;
  j["error"] = ex.what();
  j["type"] = type;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedding debiasing and downstream fairness evaluation"};
  app.require_subcommand(1);
  app.set_config("--config")->description(
      "TOML config file; keys live in a [subcommand] section, e.g. [run]");

  CliOptions o;

  auto* debias_cmd = app.add_subcommand("debias", "Debias an embedding file");
  add_io_options(debias_cmd, o, false);
  debias_cmd->add_option("--mode", o.mode_name, "none|hard|strong|project-only|equalize-only|scrub");
  debias_cmd->add_option("--output-embeddings", o.output_embeddings, "output embedding path");

  auto* run_cmd = app.add_subcommand("run", "End-to-end train + fairness report + probe");
  add_io_options(run_cmd, o, true);
  add_train_options(run_cmd, o.cfg.train);
  run_cmd->add_option("--mode", o.mode_name, "none|hard|strong|project-only|equalize-only|scrub");

  auto* abl_cmd = app.add_subcommand("ablation", "Compare none/strong/project-only/equalize-only");
  add_io_options(abl_cmd, o, true);
  add_train_options(abl_cmd, o.cfg.train);

  auto* gc_cmd = app.add_subcommand("gender-component", "Biography gender-component distribution");
  add_io_options(gc_cmd, o, true);
  gc_cmd->add_option("--filter", o.filter_name, "all|gender_specific_only|neutral_only");
  gc_cmd->add_option("--bins", o.bins, "histogram bin count");

  auto* sum_cmd = app.add_subcommand("summarize", "Per-occupation gender counts");
  sum_cmd->add_option("--dataset", o.cfg.dataset_path, "biography dataset (JSON lines)")->required();
  sum_cmd->add_option("--out", o.cfg.output_dir, "output directory");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic planted-signal corpus");
  synth_cmd->add_option("--vocab-size", o.synth.vocab_size, "vocabulary size");
  synth_cmd->add_option("--dim", o.synth.embed_dim, "embedding dimension");
  synth_cmd->add_option("--occupations", o.synth.num_occupations, "occupation count");
  synth_cmd->add_option("--bios", o.synth.num_bios, "biography count");
  synth_cmd->add_option("--signal", o.synth.gender_signal_strength, "gender signal strength [0,1]");
  synth_cmd->add_option("--noise", o.synth.neutral_noise_strength, "neutral noise strength [0,1]");
  synth_cmd->add_option("--correlation", o.synth.occupation_gender_correlation,
                        "occupation-gender correlation [0,1]");
  synth_cmd->add_option("--seed", o.synth.seed, "random seed");
  synth_cmd->add_option("--out", o.cfg.output_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (debias_cmd->parsed()) return cmd_debias(o);
    if (run_cmd->parsed()) return cmd_run(o);
    if (abl_cmd->parsed()) return cmd_ablation(o);
    if (gc_cmd->parsed()) return cmd_gender_component(o);
    if (sum_cmd->parsed()) return cmd_summarize(o);
    if (synth_cmd->parsed()) return cmd_synth(o);
  } catch (const ConfigError& ex) {
    emit_error("config", ex);
    return 2;
  } catch (const NumericError& ex) {
    emit_error("numeric", ex);
    return 4;
  } catch (const DataError& ex) {
    emit_error("data", ex);
    return 3;
  } catch (const std::exception& ex) {
    emit_error("data", ex);
    return 3;
  }
  return 2;
}
