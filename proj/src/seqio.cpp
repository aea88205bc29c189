#include "probin/seqio.hpp"

#include <cctype>
#include <fstream>

#include "probin/common.hpp"
#include "probin/util.hpp"

namespace probin::seqio {

AmbiguityPolicy parse_ambiguity_policy(std::string_view name) {
  if (name == "drop") return AmbiguityPolicy::kDropRecord;
  if (name == "map-a") return AmbiguityPolicy::kMapToA;
  if (name == "error") return AmbiguityPolicy::kError;
  throw ValidationError("unknown ambiguity policy '" + std::string(name) +
                        "' (expected drop, map-a, or error)");
}

namespace {

// Uppercases in place, applies the ambiguity policy, and reports whether the
// record survives. Position of the first bad character is 1-based.
bool finalize_bases(std::string& bases, const std::string& id, AmbiguityPolicy policy) {
  for (std::size_t i = 0; i < bases.size(); ++i) {
    char& c = bases[i];
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (c == 'A' || c == 'C' || c == 'G' || c == 'T') continue;
    switch (policy) {
      case AmbiguityPolicy::kError:
        throw ValidationError("record '" + id + "': disallowed character '" + std::string(1, c) +
                              "' at position " + std::to_string(i + 1));
      case AmbiguityPolicy::kMapToA:
        c = 'A';
        break;
      case AmbiguityPolicy::kDropRecord:
        return false;
    }
  }
  return true;
}

void strip_inline_whitespace(std::string& s) {
  std::size_t out = 0;
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\r') s[out++] = c;
  s.resize(out);
}

struct PendingRecord {
  LabeledSequence rec;
  std::size_t header_line = 0;
  bool active = false;
};

void flush_record(PendingRecord& pending, AmbiguityPolicy policy, ParsedSequences& out) {
  if (!pending.active) return;
  if (pending.rec.seq.bases.empty())
    throw ParseError("record '" + pending.rec.seq.id + "' starting at line " +
                     std::to_string(pending.header_line) + " has no sequence");
  if (finalize_bases(pending.rec.seq.bases, pending.rec.seq.id, policy))
    out.records.push_back(std::move(pending.rec));
  else
    ++out.dropped_records;
  pending = PendingRecord{};
}

}  // namespace

ParsedSequences parse_fasta(const std::filesystem::path& path, AmbiguityPolicy policy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  ParsedSequences out;
  PendingRecord pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '>') {
      flush_record(pending, policy, out);
      std::string_view header(line);
      header.remove_prefix(1);
      std::size_t bar = header.find('|');
      std::string id(header.substr(0, bar));
      strip_inline_whitespace(id);
      if (id.empty())
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": header has empty id");
      pending.active = true;
      pending.header_line = line_no;
      pending.rec.seq.id = id;
      if (bar != std::string_view::npos) {
        std::string label(header.substr(bar + 1));
        strip_inline_whitespace(label);
        if (label.empty())
          throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": header has '|' but empty label");
        pending.rec.label = label;
      }
    } else {
      if (!pending.active)
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": sequence data before the first header");
      strip_inline_whitespace(line);
      pending.rec.seq.bases += line;
    }
  }
  if (in.bad()) throw IoError("read failed on " + path.string());
  flush_record(pending, policy, out);
  return out;
}

ParsedSequences parse_sequence_tsv(const std::filesystem::path& path, AmbiguityPolicy policy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  ParsedSequences out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file, header expected");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id\tlabel\tsequence")
    throw ParseError(path.string() + ":1: header must be 'id\\tlabel\\tsequence'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty id");
    if (fields[2].empty())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty sequence");
    LabeledSequence rec;
    rec.seq.id = fields[0];
    rec.seq.bases = fields[2];
    if (!fields[1].empty()) rec.label = fields[1];
    if (finalize_bases(rec.seq.bases, rec.seq.id, policy))
      out.records.push_back(std::move(rec));
    else
      ++out.dropped_records;
  }
  if (in.bad()) throw IoError("read failed on " + path.string());
  return out;
}

std::pair<Sequence, Sequence> split_halves(const Sequence& s) {
  if (s.length() < 2)
    throw ValidationError("sequence '" + s.id + "' too short to halve (length " +
                          std::to_string(s.length()) + ")");
  const std::size_t left_len = s.length() / 2;
  Sequence left{s.id + "/l", s.bases.substr(0, left_len)};
  Sequence right{s.id + "/r", s.bases.substr(left_len)};
  return {std::move(left), std::move(right)};
}

}  // namespace probin::seqio
