#include "probin/kmer.hpp"

#include <cmath>
#include <fstream>

#include "probin/common.hpp"
#include "probin/util.hpp"

namespace probin::kmer {

std::size_t num_kmers(int k) {
  if (k < 1 || k > kMaxK)
    throw ValidationError("k must be in [1, " + std::to_string(kMaxK) + "], got " +
                          std::to_string(k));
  return std::size_t{1} << (2 * k);
}

int base_code(char b) {
  switch (b) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
  }
}

std::size_t kmer_index(std::string_view kmer) {
  if (kmer.empty() || kmer.size() > kMaxK)
    throw ValidationError("k-mer length must be in [1, " + std::to_string(kMaxK) + "]");
  std::size_t idx = 0;
  for (char b : kmer) {
    const int code = base_code(b);
    if (code < 0) throw ValidationError("k-mer '" + std::string(kmer) + "' has a non-ACGT base");
    idx = (idx << 2) | static_cast<std::size_t>(code);
  }
  return idx;
}

std::string kmer_string(std::size_t index, int k) {
  const std::size_t total = num_kmers(k);
  if (index >= total) throw ValidationError("k-mer index out of range");
  std::string s(static_cast<std::size_t>(k), 'A');
  static constexpr char kBases[4] = {'A', 'C', 'G', 'T'};
  for (int pos = k - 1; pos >= 0; --pos) {
    s[static_cast<std::size_t>(pos)] = kBases[index & 3];
    index >>= 2;
  }
  return s;
}

KmerProfile profile(std::string_view bases, std::string_view id, int k, bool normalize) {
  const std::size_t dims = num_kmers(k);
  if (bases.size() < static_cast<std::size_t>(k))
    throw ValidationError("sequence '" + std::string(id) + "' shorter than k (length " +
                          std::to_string(bases.size()) + ", k " + std::to_string(k) + ")");

  KmerProfile p;
  p.k = k;
  p.counts.assign(dims, 0.0);

  const std::size_t mask = dims - 1;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const int code = base_code(bases[i]);
    if (code < 0)
      throw ValidationError("sequence '" + std::string(id) + "' has a non-ACGT base at position " +
                            std::to_string(i + 1) + "; apply an ambiguity policy at ingest");
    idx = ((idx << 2) | static_cast<std::size_t>(code)) & mask;
    if (i + 1 >= static_cast<std::size_t>(k)) p.counts[idx] += 1.0;
  }

  if (normalize) {
    const double windows = static_cast<double>(bases.size() - static_cast<std::size_t>(k) + 1);
    for (double& c : p.counts) c /= windows;
    p.normalized = true;
  }
  return p;
}

KmerProfile profile(const seqio::Sequence& s, int k, bool normalize) {
  return profile(s.bases, s.id, k, normalize);
}

void write_profiles_tsv(const std::filesystem::path& path, std::span<const std::string> ids,
                        std::span<const KmerProfile> profiles) {
  if (ids.size() != profiles.size())
    throw ValidationError("ids and profiles differ in length");
  if (profiles.empty()) throw ValidationError("no profiles to write");
  const int k = profiles[0].k;
  const std::size_t dims = num_kmers(k);

  std::string out = "id";
  for (std::size_t i = 0; i < dims; ++i) {
    out += '\t';
    out += kmer_string(i, k);
  }
  out += '\n';
  for (std::size_t r = 0; r < profiles.size(); ++r) {
    if (profiles[r].k != k || profiles[r].counts.size() != dims)
      throw ValidationError("profile '" + ids[r] + "' has mismatched k");
    out += ids[r];
    for (double c : profiles[r].counts) {
      out += '\t';
      out += format_double(c);
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

ProfileTable read_profiles_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file, header expected");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, '\t');
  if (header.size() < 5 || header[0] != "id")
    throw ParseError(path.string() + ":1: expected 'id' plus 4^k k-mer columns");
  const std::size_t dims = header.size() - 1;
  int k = 0;
  for (std::size_t d = 1; d <= kMaxK; ++d)
    if (dims == (std::size_t{1} << (2 * d))) k = static_cast<int>(d);
  if (k == 0)
    throw ParseError(path.string() + ":1: column count " + std::to_string(dims) +
                     " is not 4^k for any k in [1, " + std::to_string(kMaxK) + "]");
  for (std::size_t i = 0; i < dims; ++i)
    if (header[i + 1] != kmer_string(i, k))
      throw ParseError(path.string() + ":1: column " + std::to_string(i + 2) +
                       " should be " + kmer_string(i, k));

  ProfileTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != dims + 1)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(dims + 1) + " fields, got " + std::to_string(fields.size()));
    KmerProfile p;
    p.k = k;
    p.counts.resize(dims);
    double sum = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
      p.counts[i] = parse_double(fields[i + 1], path.string() + ":" + std::to_string(line_no));
      sum += p.counts[i];
    }
    // The format carries no explicit flag; rows summing to 1 are frequencies.
    p.normalized = std::abs(sum - 1.0) <= 1e-6;
    table.ids.push_back(fields[0]);
    table.profiles.push_back(std::move(p));
  }
  if (in.bad()) throw IoError("read failed on " + path.string());
  return table;
}

}  // namespace probin::kmer
