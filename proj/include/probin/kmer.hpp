// k-mer profiles: base-4 packed indexing (A=0, C=1, G=2, T=3) and
// sliding-window counting, with TSV import/export.
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probin/seqio.hpp"

namespace probin::kmer {

inline constexpr int kMaxK = 8;

struct KmerProfile {
  int k = 0;
  bool normalized = false;       // counts divided by the window count L-k+1
  std::vector<double> counts;    // length 4^k
};

// 4^k after validating k in [1, kMaxK].
std::size_t num_kmers(int k);

// -1 for anything outside {A,C,G,T}.
int base_code(char b);

std::size_t kmer_index(std::string_view kmer);
std::string kmer_string(std::size_t index, int k);

KmerProfile profile(std::string_view bases, std::string_view id, int k, bool normalize);
KmerProfile profile(const seqio::Sequence& s, int k, bool normalize);

struct ProfileTable {
  std::vector<std::string> ids;
  std::vector<KmerProfile> profiles;
};

// Header row is "id" followed by all 4^k k-mer strings in index order.
void write_profiles_tsv(const std::filesystem::path& path, std::span<const std::string> ids,
                        std::span<const KmerProfile> profiles);
ProfileTable read_profiles_tsv(const std::filesystem::path& path);

}  // namespace probin::kmer
