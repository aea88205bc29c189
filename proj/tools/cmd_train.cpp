// train subcommand: contrastive two-stage training from raw sequences
// (fragment halving) or from pre-computed profiles with labels.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/common.hpp"
#include "probin/kmer.hpp"
#include "probin/model.hpp"
#include "probin/seqio.hpp"
#include "probin/training.hpp"

namespace probin::cli {

namespace {

struct TrainOpts {
  CommonOpts common;
  std::string fasta;
  std::string profiles;
  std::string truth;
  std::string checkpoint_out;
  std::string trace_out;
  std::string kind = "probabilistic";
  std::string ambiguity = "drop";
  std::size_t subsample = 0;  // 0 keeps everything
  int k = 4;
  bool raw_counts = false;
  int positives_per_class = 4;
  std::size_t hidden = 512;
  std::size_t latent = 256;
  double alpha = 1.0;
  double variance_floor = 1e-6;
  training::TrainConfig train;
};

void run_train(TrainOpts& o) {
  if (o.fasta.empty() == o.profiles.empty()) {
    throw ValidationError("train: give exactly one of --fasta or --profiles");
  }
  if (!o.profiles.empty() && o.truth.empty()) {
    throw ValidationError("train: --profiles requires --truth for labels");
  }
  o.train.seed = o.common.seed;

  Manifest manifest("train", o.common);
  manifest.set("kind", o.kind);
  manifest.set("k", o.k);
  manifest.set("normalize", !o.raw_counts);
  manifest.set("hidden", o.hidden);
  manifest.set("latent", o.latent);
  manifest.set("alpha", o.alpha);
  manifest.set("variance_floor", o.variance_floor);
  manifest.set("learning_rate", o.train.learning_rate);
  manifest.set("mean_epochs", o.train.mean_epochs);
  manifest.set("var_epochs", o.train.var_epochs);
  manifest.set("negatives_per_positive", o.train.negatives_per_positive);
  manifest.set("batch_size", o.train.batch_size);
  manifest.set("regenerate_stage2_pairs", o.train.regenerate_stage2_pairs);
  manifest.set("checkpoint_out", o.checkpoint_out);

  training::KmerOptions kmer_opts;
  kmer_opts.k = o.k;
  kmer_opts.normalize = !o.raw_counts;

  training::PairSet pairs;
  training::PairSet stage2;
  const training::PairSet* stage2_ptr = nullptr;
  std::size_t num_items = 0;
  if (!o.fasta.empty()) {
    manifest.add_input(o.fasta);
    manifest.set("input", o.fasta);
    manifest.set("subsample", o.subsample);
    const seqio::AmbiguityPolicy policy = seqio::parse_ambiguity_policy(o.ambiguity);
    seqio::ParsedSequences parsed = seqio::parse_fasta(o.fasta, policy);
    std::vector<seqio::LabeledSequence> records = std::move(parsed.records);
    if (o.subsample > 0 && o.subsample < records.size()) {
      records = training::subsample(records, o.subsample, o.common.seed);
    }
    std::vector<seqio::Sequence> fragments;
    fragments.reserve(records.size());
    for (seqio::LabeledSequence& rec : records) fragments.push_back(std::move(rec.seq));
    num_items = fragments.size();
    pairs = training::build_pairs(fragments, o.train, kmer_opts);
    if (o.train.regenerate_stage2_pairs) {
      // Fresh negatives for the variance stage, drawn from the next seed.
      training::TrainConfig cfg2 = o.train;
      cfg2.seed = o.train.seed + 1;
      stage2 = training::build_pairs(fragments, cfg2, kmer_opts);
      stage2_ptr = &stage2;
    }
  } else {
    manifest.add_input(o.profiles);
    manifest.add_input(o.truth);
    manifest.set("input", o.profiles);
    manifest.set("truth", o.truth);
    manifest.set("positives_per_class", o.positives_per_class);
    const kmer::ProfileTable table = kmer::read_profiles_tsv(o.profiles);
    const evaluation::TruthTable truth = evaluation::read_truth_tsv(o.truth);
    const std::vector<std::string> labels = align_labels(table.ids, truth, "train");
    num_items = table.ids.size();
    pairs = training::build_labeled_pairs(table.profiles, labels, o.positives_per_class,
                                          o.train.negatives_per_positive, o.common.seed);
    if (o.train.regenerate_stage2_pairs) {
      stage2 = training::build_labeled_pairs(table.profiles, labels, o.positives_per_class,
                                             o.train.negatives_per_positive, o.common.seed + 1);
      stage2_ptr = &stage2;
    }
  }

  model::ModelConfig model_cfg;
  model_cfg.input_dim = pairs.profiles.empty() ? kmer::num_kmers(o.k)
                                               : pairs.profiles.front().counts.size();
  model_cfg.hidden_dim = o.hidden;
  model_cfg.latent_dim = o.latent;
  model_cfg.alpha = o.alpha;
  model_cfg.variance_floor = o.variance_floor;

  const model::ModelKind kind = model::parse_model_kind(o.kind);
  const training::TrainResult result = training::train(pairs, model_cfg, o.train, kind, stage2_ptr);
  model::save_checkpoint(o.checkpoint_out, result.params);
  manifest.add_output(o.checkpoint_out);
  if (!o.trace_out.empty()) {
    training::write_trace_csv(o.trace_out, result.trace);
    manifest.add_output(o.trace_out);
    manifest.set("trace_out", o.trace_out);
  }
  manifest.write(o.checkpoint_out);

  const double final_loss = result.trace.empty() ? 0.0 : result.trace.back().mean_loss;
  std::printf("trained %s model on %zu items, %zu pairs; final mean loss %.6f -> %s\n",
              o.kind.c_str(), num_items, pairs.pairs.size(), final_loss,
              o.checkpoint_out.c_str());
}

}  // namespace

void register_train(CLI::App& app) {
  auto opts = std::make_shared<TrainOpts>();
  CLI::App* cmd = app.add_subcommand("train", "Train an embedding model on fragment pairs");
  cmd->add_option("--fasta", opts->fasta, "FASTA input; fragments are halved into pair views");
  cmd->add_option("--profiles", opts->profiles, "Profile TSV input (requires --truth)");
  cmd->add_option("--truth", opts->truth, "Truth TSV with labels for --profiles");
  cmd->add_option("--checkpoint-out", opts->checkpoint_out, "Model checkpoint JSON to write")
      ->required();
  cmd->add_option("--trace-out", opts->trace_out, "Per-epoch loss CSV to write");
  cmd->add_option("--kind", opts->kind, "Model kind: probabilistic or deterministic")
      ->check(CLI::IsMember({"probabilistic", "deterministic"}))
      ->capture_default_str();
  cmd->add_option("--ambiguity", opts->ambiguity, "Non-ACGT handling: drop, map-a, or error")
      ->check(CLI::IsMember({"drop", "map-a", "error"}))
      ->capture_default_str();
  cmd->add_option("--subsample", opts->subsample, "Train on this many fragments (0 = all)")
      ->capture_default_str();
  cmd->add_option("--k", opts->k, "k-mer length")->check(CLI::Range(1, 8))->capture_default_str();
  cmd->add_flag("--raw-counts", opts->raw_counts, "Keep raw counts instead of frequencies");
  cmd->add_option("--positives-per-class", opts->positives_per_class,
                  "Positive partners per item and class (labeled input)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--hidden", opts->hidden, "Hidden layer width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--latent", opts->latent, "Latent dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", opts->alpha, "Kernel bandwidth scale of the expected likelihood")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--variance-floor", opts->variance_floor, "Minimum predicted variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lr", opts->train.learning_rate, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--mean-epochs", opts->train.mean_epochs, "Stage-1 epochs (mean head)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--var-epochs", opts->train.var_epochs, "Stage-2 epochs (variance head)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--negatives", opts->train.negatives_per_positive, "Negatives per positive")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--batch-size", opts->train.batch_size, "Pairs per optimizer step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--regenerate-stage2-pairs", opts->train.regenerate_stage2_pairs,
                "Draw fresh pairs (seed+1) for the variance stage");
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_train(*opts);
  });
}

}  // namespace probin::cli
