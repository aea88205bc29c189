// Sequence ingestion (FASTA and TSV) with explicit handling of non-ACGT
// characters, plus the deterministic fragment halving used to build
// training pairs.
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace probin::seqio {

struct Sequence {
  std::string id;
  std::string bases;  // uppercase ACGT after ingest
  std::size_t length() const { return bases.size(); }
};

struct LabeledSequence {
  Sequence seq;
  std::optional<std::string> label;
};

// What to do with a record containing characters outside {A,C,G,T} after
// uppercasing. Whitespace inside sequence lines is formatting and is
// stripped before the policy applies.
enum class AmbiguityPolicy { kDropRecord, kMapToA, kError };

AmbiguityPolicy parse_ambiguity_policy(std::string_view name);

struct ParsedSequences {
  std::vector<LabeledSequence> records;  // input order preserved
  std::size_t dropped_records = 0;       // removed under kDropRecord
};

// FASTA headers are ">ID" or ">ID|LABEL". Empty id, empty label after '|',
// or a record with no sequence is a ParseError naming the line.
ParsedSequences parse_fasta(const std::filesystem::path& path,
                            AmbiguityPolicy policy = AmbiguityPolicy::kDropRecord);

// Tab-separated columns id, label, sequence; the header row is required.
// An empty label field means unlabeled.
ParsedSequences parse_sequence_tsv(const std::filesystem::path& path,
                                   AmbiguityPolicy policy = AmbiguityPolicy::kDropRecord);

// Left half gets floor(L/2) bases, right half the rest. Length >= 2 required.
std::pair<Sequence, Sequence> split_halves(const Sequence& s);

}  // namespace probin::seqio
