// synth subcommand: sample the toy multi-class dataset.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/evaluation.hpp"
#include "probin/kmer.hpp"
#include "probin/synth.hpp"

namespace probin::cli {

namespace {

struct SynthOpts {
  CommonOpts common;
  synth::ToyConfig toy;
  std::string profiles_out;
  std::string truth_out;
};

void run_synth(SynthOpts& o) {
  o.toy.seed = o.common.seed;
  Manifest manifest("synth", o.common);
  manifest.set("classes", o.toy.num_classes);
  manifest.set("per_class", o.toy.seqs_per_class);
  manifest.set("length", o.toy.seq_len);
  manifest.set("k", o.toy.k);
  manifest.set("smoothing", o.toy.smoothing);
  manifest.set("multiclass", o.toy.num_multiclass);
  manifest.set("profiles_out", o.profiles_out);
  manifest.set("truth_out", o.truth_out);

  const synth::ToyDataset data = synth::sample_dataset(o.toy);
  kmer::write_profiles_tsv(o.profiles_out, data.ids, data.profiles);
  evaluation::write_truth_tsv(o.truth_out, data.ids, data.labels);
  manifest.add_output(o.profiles_out);
  manifest.add_output(o.truth_out);
  manifest.write(o.profiles_out);
  std::printf("sampled %zu items (%d classes, %d mixed) -> %s\n", data.ids.size(),
              o.toy.num_classes, o.toy.num_multiclass, o.profiles_out.c_str());
}

}  // namespace

void register_synth(CLI::App& app) {
  auto opts = std::make_shared<SynthOpts>();
  CLI::App* cmd = app.add_subcommand("synth", "Sample a synthetic multi-class toy dataset");
  cmd->add_option("--classes", opts->toy.num_classes, "Number of classes")
      ->check(CLI::Range(2, 1024))
      ->capture_default_str();
  cmd->add_option("--per-class", opts->toy.seqs_per_class, "Items per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--length", opts->toy.seq_len, "Nominal sequence length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--k", opts->toy.k, "k-mer length")
      ->check(CLI::Range(1, 8))
      ->capture_default_str();
  cmd->add_option("--smoothing", opts->toy.smoothing, "Off-block probability mass")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--multiclass", opts->toy.num_multiclass,
                  "Extra items mixing two adjacent classes")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--profiles-out", opts->profiles_out, "Profile TSV to write")->required();
  cmd->add_option("--truth-out", opts->truth_out, "Truth TSV to write")->required();
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_synth(*opts);
  });
}

}  // namespace probin::cli
