// Shared CLI plumbing.
#include "cli_common.hpp"

#include "probin/common.hpp"
#include "probin/util.hpp"

namespace probin::cli {

std::vector<std::string> align_labels(const std::vector<std::string>& ids,
                                      const evaluation::TruthTable& truth, const char* context) {
  std::vector<std::string> labels;
  labels.reserve(ids.size());
  for (const std::string& id : ids) {
    const std::string* label = truth.find(id);
    if (label == nullptr) {
      throw ValidationError(std::string(context) + ": no truth label for id " + id);
    }
    labels.push_back(*label);
  }
  return labels;
}

void add_common_options(CLI::App& cmd, CommonOpts& opts) {
  cmd.add_option("--seed", opts.seed, "Random seed")->capture_default_str();
  cmd.add_option("--threads", opts.threads, "Worker threads (recorded; execution is sequential)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_flag("--deterministic,!--no-deterministic", opts.deterministic,
               "Record that the run is reproducible byte-for-byte");
  cmd.add_option("--config", opts.config_file,
                 "Read options from a key=value config file; command-line values win");
}

void apply_config_file(CLI::App& cmd, const std::string& path) {
  if (path.empty()) return;
  const auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
      s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };
  std::size_t line_no = 0;
  for (const std::string& raw : split(read_text_file(path), '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto where = [&] { return path + ":" + std::to_string(line_no) + ": "; };
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where() + "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(where() + "empty key");
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr) throw ParseError(where() + "unknown option " + key);
    if (opt->count() > 0) continue;  // the command line wins
    opt->add_result(value);
    opt->run_callback();
  }
}

Manifest::Manifest(std::string command, const CommonOpts& opts)
    : command_(std::move(command)),
      opts_(opts),
      config_(nlohmann::ordered_json::object()),
      start_(std::chrono::steady_clock::now()) {}

void Manifest::add_input(const std::filesystem::path& path) { inputs_.push_back(path); }

void Manifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void Manifest::write(const std::filesystem::path& primary_output) {
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["seed"] = opts_.seed;
  j["deterministic"] = opts_.deterministic;
  j["threads"] = opts_.threads;
  j["config"] = config_;
  auto listing = [](const std::vector<std::filesystem::path>& paths) {
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const std::filesystem::path& p : paths) {
      nlohmann::ordered_json f;
      f["path"] = p.string();
      f["checksum"] = file_checksum(p);
      files.push_back(std::move(f));
    }
    return files;
  };
  j["inputs"] = listing(inputs_);
  j["outputs"] = listing(outputs_);
  const auto elapsed = std::chrono::steady_clock::now() - start_;
  j["duration_seconds"] =
      std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();

  std::filesystem::path manifest_path = primary_output;
  manifest_path += ".manifest.json";
  atomic_write_text(manifest_path, j.dump(1) + "\n");
}

}  // namespace probin::cli
