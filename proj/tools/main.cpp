// probin: probabilistic k-mer embeddings for fragment binning.
#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "probin/common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic k-mer fragment embedding, binning, and evaluation"};
  app.require_subcommand(1);

  probin::cli::register_profile(app);
  probin::cli::register_synth(app);
  probin::cli::register_train(app);
  probin::cli::register_embed(app);
  probin::cli::register_bin(app);
  probin::cli::register_eval(app);
  probin::cli::register_filter(app);
  probin::cli::register_sweep(app);
  probin::cli::register_theory(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems collapse to exit code 1
  } catch (const probin::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const probin::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
