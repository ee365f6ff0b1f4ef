// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <iosfwd>
#include <optional>

#include "genovault/common.hpp"

namespace genovault::genomics {

// --- FASTQ ---------------------------------------------------------------------

struct FastqRecord {
  std::string id;    // without the leading '@'
  std::string seq;   // bases over {A,C,G,T,N}
  std::string qual;  // same length as seq
};

std::vector<FastqRecord> parse_fastq(std::istream& in);
std::vector<FastqRecord> parse_fastq_bytes(ByteView data, bool gzipped = false);
void write_fastq(const std::vector<FastqRecord>& records, std::ostream& out);
Bytes write_fastq_bytes(const std::vector<FastqRecord>& records);

/// Alignment tag carried in read ids of the form sim|<chrom>|<pos> (1-based).
/// Synthetic reads carry their mapping so the toy caller needs no aligner.
struct SimReadTag {
  std::string chrom;
  std::uint64_t pos = 0;

  static SimReadTag parse(const std::string& read_id);
};

// --- reference -------------------------------------------------------------------

struct Reference {
  std::map<std::string, std::string> chroms;

  static Reference from_fasta(std::istream& in);
  static Reference from_fasta_bytes(ByteView data);
  void write_fasta(std::ostream& out) const;
  Bytes write_fasta_bytes() const;
};

// --- VCF ------------------------------------------------------------------------

struct VcfRecord {
  std::string chrom;
  std::uint64_t pos = 0;  // 1-based
  std::string id = ".";
  char ref_base = 'N';
  char alt_base = 'N';
  int qual = 0;
  std::string filter = "PASS";
  std::uint32_t depth = 0;          // rendered as INFO DP=
  std::string genotype = "0/1";     // one of 0/1, 1/1
};

/// Minimal single-sample VCFv4.2 subset: "##" meta lines, one #CHROM header,
/// ten tab-separated columns, SNV records only, INFO restricted to "." or
/// "DP=<int>", FORMAT fixed to GT.
struct VcfDocument {
  std::vector<std::string> meta;  // "##..." lines, verbatim
  std::string sample_name = "SAMPLE";
  std::vector<VcfRecord> records;
  bool sorted_on_parse = true;

  std::string to_text() const;
  Bytes to_bytes() const;
  static VcfDocument from_text(const std::string& text);
  static VcfDocument from_bytes(ByteView data);

  bool is_sorted() const;
};

// --- toy variant caller ------------------------------------------------------------

struct CallerParams {
  std::uint32_t min_depth = 2;
  double alt_fraction = 0.5;
  double hom_fraction = 0.8;
};

/// Deterministic pileup caller standing in for the production analysis
/// engine. Emits one SNV per position where the dominant non-reference base
/// reaches alt_fraction at depth >= min_depth; genotype 1/1 at hom_fraction.
/// N bases count toward neither depth nor the alternative.
VcfDocument toy_call(const std::vector<FastqRecord>& reads, const Reference& reference,
                     const CallerParams& params = {});

// --- access filtering ----------------------------------------------------------------

struct Region {
  std::string chrom;
  std::uint64_t start = 0;  // inclusive
  std::uint64_t end = 0;    // inclusive
};

enum class FilterMode { region, count, both };

struct FilterPolicy {
  FilterMode mode = FilterMode::region;
  std::vector<Region> regions;
  std::optional<std::uint64_t> max_records;

  std::string describe() const;
};

/// Keeps the policy-selected subset of records, order preserved; headers are
/// kept with one added provenance meta line.
VcfDocument filter_vcf(const VcfDocument& doc, const FilterPolicy& policy);

// --- gzip (RFC 1952) -------------------------------------------------------------------

Bytes gzip_compress(ByteView data);
Bytes gzip_decompress(ByteView data);
bool looks_gzipped(ByteView data);

// --- synthetic data ---------------------------------------------------------------------

struct SimulateParams {
  std::uint64_t reference_length = 100000;
  std::uint64_t num_reads = 2000;
  std::uint32_t read_length = 100;
  std::uint64_t num_variants = 50;
  std::uint64_t seed = 1;
  std::string chrom = "chr1";
};

struct SimulatedDataset {
  Reference reference;
  std::vector<FastqRecord> reads;
  VcfDocument truth;  // the planted variant set
};

/// Noise-free reads drawn from a mutated copy of a random reference. Every
/// planted variant is covered by at least three reads so a min_depth=2 caller
/// recovers the truth set exactly.
SimulatedDataset simulate_dataset(const SimulateParams& params);

}  // namespace genovault::genomics
