// FASTA/TSV ingestion, ambiguity policies, and fragment halving.
#include <string>

#include "doctest.h"
#include "probin/common.hpp"
#include "probin/seqio.hpp"
#include "probin/util.hpp"
#include "test_util.hpp"

using namespace probin;

namespace {

std::filesystem::path write_file(const std::filesystem::path& dir, const char* name,
                                 const std::string& text) {
  const auto p = dir / name;
  atomic_write_text(p, text);
  return p;
}

}  // namespace

TEST_CASE("parse_fasta joins wrapped lines and reads labels") {
  const auto dir = testutil::scratch_dir("seqio_fasta");
  const auto path = write_file(dir, "in.fa",
                               ">frag1|speciesA\nacgt\nACGT\n\n>frag2\nTT GG\r\n>frag3|b\nc\n");
  const seqio::ParsedSequences out = seqio::parse_fasta(path);
  REQUIRE(out.records.size() == 3);
  CHECK(out.dropped_records == 0);
  CHECK(out.records[0].seq.id == "frag1");
  CHECK(out.records[0].seq.bases == "ACGTACGT");
  REQUIRE(out.records[0].label.has_value());
  CHECK(*out.records[0].label == "speciesA");
  CHECK(out.records[1].seq.id == "frag2");
  CHECK(out.records[1].seq.bases == "TTGG");
  CHECK_FALSE(out.records[1].label.has_value());
  CHECK(out.records[2].seq.bases == "C");
}

TEST_CASE("parse_fasta rejects malformed headers and dangling data") {
  const auto dir = testutil::scratch_dir("seqio_fasta_bad");
  CHECK_THROWS_AS(seqio::parse_fasta(dir / "missing.fa"), IoError);
  CHECK_THROWS_AS(seqio::parse_fasta(write_file(dir, "noid.fa", ">\nACGT\n")), ParseError);
  CHECK_THROWS_AS(seqio::parse_fasta(write_file(dir, "nolabel.fa", ">x|\nACGT\n")), ParseError);
  CHECK_THROWS_AS(seqio::parse_fasta(write_file(dir, "early.fa", "ACGT\n>x\nACGT\n")), ParseError);
  CHECK_THROWS_AS(seqio::parse_fasta(write_file(dir, "noseq.fa", ">x\n>y\nACGT\n")), ParseError);
  CHECK_THROWS_AS(seqio::parse_fasta(write_file(dir, "tailnoseq.fa", ">x\nACGT\n>y\n")),
                  ParseError);
}

TEST_CASE("ambiguity policies drop, rewrite, or reject records") {
  const auto dir = testutil::scratch_dir("seqio_policy");
  const auto path = write_file(dir, "in.fa", ">ok\nACGT\n>noisy\nACNT\n");

  const seqio::ParsedSequences dropped =
      seqio::parse_fasta(path, seqio::AmbiguityPolicy::kDropRecord);
  REQUIRE(dropped.records.size() == 1);
  CHECK(dropped.records[0].seq.id == "ok");
  CHECK(dropped.dropped_records == 1);

  const seqio::ParsedSequences mapped = seqio::parse_fasta(path, seqio::AmbiguityPolicy::kMapToA);
  REQUIRE(mapped.records.size() == 2);
  CHECK(mapped.records[1].seq.bases == "ACAT");
  CHECK(mapped.dropped_records == 0);

  CHECK_THROWS_AS(seqio::parse_fasta(path, seqio::AmbiguityPolicy::kError), ValidationError);

  CHECK(seqio::parse_ambiguity_policy("drop") == seqio::AmbiguityPolicy::kDropRecord);
  CHECK(seqio::parse_ambiguity_policy("map-a") == seqio::AmbiguityPolicy::kMapToA);
  CHECK(seqio::parse_ambiguity_policy("error") == seqio::AmbiguityPolicy::kError);
  CHECK_THROWS_AS(seqio::parse_ambiguity_policy("keep"), ValidationError);
}

TEST_CASE("parse_sequence_tsv reads labeled and unlabeled rows") {
  const auto dir = testutil::scratch_dir("seqio_tsv");
  const auto path = write_file(dir, "in.tsv",
                               "id\tlabel\tsequence\nf1\tspeciesA\tacgt\nf2\t\tTTGG\n");
  const seqio::ParsedSequences out = seqio::parse_sequence_tsv(path);
  REQUIRE(out.records.size() == 2);
  CHECK(out.records[0].seq.bases == "ACGT");
  CHECK(*out.records[0].label == "speciesA");
  CHECK_FALSE(out.records[1].label.has_value());

  CHECK_THROWS_AS(seqio::parse_sequence_tsv(write_file(dir, "bad_header.tsv", "id\tseq\n")),
                  ParseError);
  CHECK_THROWS_AS(
      seqio::parse_sequence_tsv(write_file(dir, "bad_fields.tsv", "id\tlabel\tsequence\nf1\tx\n")),
      ParseError);
  CHECK_THROWS_AS(seqio::parse_sequence_tsv(
                      write_file(dir, "empty_id.tsv", "id\tlabel\tsequence\n\tx\tACGT\n")),
                  ParseError);
  CHECK_THROWS_AS(seqio::parse_sequence_tsv(
                      write_file(dir, "empty_seq.tsv", "id\tlabel\tsequence\nf1\tx\t\n")),
                  ParseError);
}

TEST_CASE("split_halves gives the left half floor(L/2) bases") {
  const seqio::Sequence s{"frag", "ACGTA"};
  const auto [left, right] = seqio::split_halves(s);
  CHECK(left.id == "frag/l");
  CHECK(left.bases == "AC");
  CHECK(right.id == "frag/r");
  CHECK(right.bases == "GTA");

  const auto [l2, r2] = seqio::split_halves({"even", "ACGT"});
  CHECK(l2.bases == "AC");
  CHECK(r2.bases == "GT");

  CHECK_THROWS_AS(seqio::split_halves({"tiny", "A"}), ValidationError);
}
