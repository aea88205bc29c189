// embed subcommand: checkpoint + profiles to Gaussian embeddings.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/kmer.hpp"
#include "probin/model.hpp"

namespace probin::cli {

namespace {

struct EmbedOpts {
  CommonOpts common;
  std::string checkpoint;
  std::string profiles;
  std::string output;
};

void run_embed(const EmbedOpts& o) {
  Manifest manifest("embed", o.common);
  manifest.add_input(o.checkpoint);
  manifest.add_input(o.profiles);
  manifest.set("checkpoint", o.checkpoint);
  manifest.set("profiles", o.profiles);
  manifest.set("output", o.output);

  const model::MlpParams params = model::load_checkpoint(o.checkpoint);
  const kmer::ProfileTable table = kmer::read_profiles_tsv(o.profiles);
  const model::EmbeddingSet set = model::embed_all(params, table.profiles, table.ids);
  model::write_embeddings_tsv(o.output, set);
  manifest.add_output(o.output);
  manifest.write(o.output);
  std::printf("embedded %zu items into %zu dims -> %s\n", set.count, set.dim, o.output.c_str());
}

}  // namespace

void register_embed(CLI::App& app) {
  auto opts = std::make_shared<EmbedOpts>();
  CLI::App* cmd = app.add_subcommand("embed", "Embed k-mer profiles with a trained model");
  cmd->add_option("--checkpoint", opts->checkpoint, "Model checkpoint JSON")->required();
  cmd->add_option("--profiles", opts->profiles, "Profile TSV to embed")->required();
  cmd->add_option("--output", opts->output, "Embedding TSV to write")->required();
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_embed(*opts);
  });
}

}  // namespace probin::cli
