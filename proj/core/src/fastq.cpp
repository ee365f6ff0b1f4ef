// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include <istream>
#include <ostream>
#include <sstream>

#include "genovault/genomics.hpp"

namespace genovault::genomics {

namespace {

bool valid_base(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T' || c == 'N'; }

}  // namespace

std::vector<FastqRecord> parse_fastq(std::istream& in) {
  std::vector<FastqRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.peek() == EOF) {
      break;  // trailing newline
    }
    if (line.empty() || line[0] != '@') {
      throw Error("genomics", "bad-fastq",
                  "line " + std::to_string(line_no) + ": expected '@' record header");
    }
    FastqRecord rec;
    rec.id = line.substr(1);

    if (!std::getline(in, line)) {
      throw Error("genomics", "truncated-record",
                  "line " + std::to_string(line_no) + ": record ends before sequence line");
    }
    ++line_no;
    rec.seq = line;
    for (char c : rec.seq) {
      if (!valid_base(c)) {
        throw Error("genomics", "bad-base",
                    "line " + std::to_string(line_no) + ": base '" + std::string(1, c) +
                        "' outside {A,C,G,T,N}");
      }
    }

    if (!std::getline(in, line)) {
      throw Error("genomics", "truncated-record",
                  "line " + std::to_string(line_no) + ": record ends before '+' line");
    }
    ++line_no;
    if (line.empty() || line[0] != '+') {
      throw Error("genomics", "bad-fastq", "line " + std::to_string(line_no) + ": expected '+'");
    }

    if (!std::getline(in, line)) {
      throw Error("genomics", "truncated-record",
                  "line " + std::to_string(line_no) + ": record ends before quality line");
    }
    ++line_no;
    rec.qual = line;
    if (rec.qual.size() != rec.seq.size()) {
      throw Error("genomics", "length-mismatch",
                  "line " + std::to_string(line_no) + ": quality length " +
                      std::to_string(rec.qual.size()) + " != sequence length " +
                      std::to_string(rec.seq.size()));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<FastqRecord> parse_fastq_bytes(ByteView data, bool gzipped) {
  Bytes plain;
  if (gzipped) {
    plain = gzip_decompress(data);
    data = ByteView(plain.data(), plain.size());
  }
  std::istringstream in(std::string(data.begin(), data.end()));
  return parse_fastq(in);
}

void write_fastq(const std::vector<FastqRecord>& records, std::ostream& out) {
  for (const auto& rec : records) {
    out << '@' << rec.id << '\n' << rec.seq << '\n' << "+\n" << rec.qual << '\n';
  }
}

Bytes write_fastq_bytes(const std::vector<FastqRecord>& records) {
  std::ostringstream out;
  write_fastq(records, out);
  const std::string s = out.str();
  return Bytes(s.begin(), s.end());
}

SimReadTag SimReadTag::parse(const std::string& read_id) {
  // sim|<chrom>|<pos>
  constexpr const char* kPrefix = "sim|";
  if (read_id.rfind(kPrefix, 0) != 0) {
    throw Error("genomics", "bad-read-tag", "read id lacks the sim| prefix: " + read_id);
  }
  std::size_t second = read_id.find('|', 4);
  if (second == std::string::npos || second == 4 || second + 1 >= read_id.size()) {
    throw Error("genomics", "bad-read-tag", "malformed sim read id: " + read_id);
  }
  SimReadTag tag;
  tag.chrom = read_id.substr(4, second - 4);
  try {
    tag.pos = std::stoull(read_id.substr(second + 1));
  } catch (const std::exception&) {
    throw Error("genomics", "bad-read-tag", "unparsable position in read id: " + read_id);
  }
  if (tag.pos < 1) {
    throw Error("genomics", "bad-read-tag", "positions are 1-based: " + read_id);
  }
  return tag;
}

Reference Reference::from_fasta(std::istream& in) {
  Reference ref;
  std::string line;
  std::string current;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line[0] == '>') {
      current = line.substr(1);
      std::size_t space = current.find_first_of(" \t");
      if (space != std::string::npos) {
        current = current.substr(0, space);
      }
      if (current.empty()) {
        throw Error("genomics", "bad-fasta", "empty sequence name");
      }
      ref.chroms[current];
    } else {
      if (current.empty()) {
        throw Error("genomics", "bad-fasta", "sequence data before any '>' header");
      }
      for (char c : line) {
        if (!valid_base(c)) {
          throw Error("genomics", "bad-base",
                      std::string("reference base '") + c + "' outside {A,C,G,T,N}");
        }
      }
      ref.chroms[current] += line;
    }
  }
  for (const auto& [name, seq] : ref.chroms) {
    if (seq.empty()) {
      throw Error("genomics", "bad-fasta", "chromosome " + name + " has no sequence");
    }
  }
  return ref;
}

Reference Reference::from_fasta_bytes(ByteView data) {
  std::istringstream in(std::string(data.begin(), data.end()));
  return from_fasta(in);
}

void Reference::write_fasta(std::ostream& out) const {
  for (const auto& [name, seq] : chroms) {
    out << '>' << name << '\n';
    for (std::size_t off = 0; off < seq.size(); off += 70) {
      out << seq.substr(off, 70) << '\n';
    }
  }
}

Bytes Reference::write_fasta_bytes() const {
  std::ostringstream out;
  write_fasta(out);
  const std::string s = out.str();
  return Bytes(s.begin(), s.end());
}

}  // namespace genovault::genomics
