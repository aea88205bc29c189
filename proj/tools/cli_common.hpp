// Shared CLI plumbing: common options and run manifests.
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "probin/evaluation.hpp"

namespace probin::cli {

struct CommonOpts {
  std::uint64_t seed = 0;
  int threads = 1;  // recorded for provenance; execution is single-threaded
  bool deterministic = true;
  std::string config_file;
};

// Adds --seed, --threads, --deterministic, and --config to a subcommand.
void add_common_options(CLI::App& cmd, CommonOpts& opts);

// Applies a flat key=value config file ('#' comments allowed) to `cmd`'s
// options. Keys are long option names without the dashes; options already
// given on the command line keep their values. Call at the top of the
// subcommand callback, before reading any option structs.
void apply_config_file(CLI::App& cmd, const std::string& path);

// Collects inputs, outputs, and effective settings for one run and writes
// them next to the primary output as "<output>.manifest.json". Checksums
// are taken at write() time, after the outputs exist.
class Manifest {
 public:
  Manifest(std::string command, const CommonOpts& opts);

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  template <typename T>
  void set(const std::string& key, const T& value) {
    config_[key] = value;
  }

  void write(const std::filesystem::path& primary_output);

 private:
  std::string command_;
  CommonOpts opts_;
  nlohmann::ordered_json config_;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
  std::chrono::steady_clock::time_point start_;
};

// Truth labels in id order; a missing id is a ValidationError naming
// `context`.
std::vector<std::string> align_labels(const std::vector<std::string>& ids,
                                      const evaluation::TruthTable& truth, const char* context);

void register_profile(CLI::App& app);
void register_synth(CLI::App& app);
void register_train(CLI::App& app);
void register_embed(CLI::App& app);
void register_bin(CLI::App& app);
void register_eval(CLI::App& app);
void register_filter(CLI::App& app);
void register_sweep(CLI::App& app);
void register_theory(CLI::App& app);

}  // namespace probin::cli
