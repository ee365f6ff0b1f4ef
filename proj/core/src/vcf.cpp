// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include <algorithm>
#include <sstream>

#include "genovault/genomics.hpp"

namespace genovault::genomics {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool record_less(const VcfRecord& a, const VcfRecord& b) {
  if (a.chrom != b.chrom) return a.chrom < b.chrom;
  return a.pos < b.pos;
}

}  // namespace

bool VcfDocument::is_sorted() const {
  return std::is_sorted(records.begin(), records.end(), record_less);
}

std::string VcfDocument::to_text() const {
  std::ostringstream out;
  for (const auto& m : meta) {
    out << m << '\n';
  }
  out << "#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO\tFORMAT\t" << sample_name << '\n';
  for (const auto& r : records) {
    out << r.chrom << '\t' << r.pos << '\t' << r.id << '\t' << r.ref_base << '\t' << r.alt_base
        << '\t' << r.qual << '\t' << r.filter << '\t';
    if (r.depth > 0) {
      out << "DP=" << r.depth;
    } else {
      out << '.';
    }
    out << "\tGT\t" << r.genotype << '\n';
  }
  return out.str();
}

Bytes VcfDocument::to_bytes() const {
  const std::string s = to_text();
  return Bytes(s.begin(), s.end());
}

VcfDocument VcfDocument::from_text(const std::string& text) {
  VcfDocument doc;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("##", 0) == 0) {
      if (header_seen) {
        throw Error("genomics", "bad-vcf",
                    "line " + std::to_string(line_no) + ": meta line after #CHROM header");
      }
      doc.meta.push_back(line);
      continue;
    }
    if (line.rfind("#CHROM", 0) == 0) {
      auto fields = split_tabs(line);
      if (fields.size() != 10) {
        throw Error("genomics", "column-mismatch",
                    "line " + std::to_string(line_no) + ": header has " +
                        std::to_string(fields.size()) + " columns, expected 10");
      }
      doc.sample_name = fields[9];
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      continue;
    }
    if (!header_seen) {
      throw Error("genomics", "bad-vcf",
                  "line " + std::to_string(line_no) + ": record before #CHROM header");
    }
    auto fields = split_tabs(line);
    if (fields.size() != 10) {
      throw Error("genomics", "column-mismatch",
                  "line " + std::to_string(line_no) + ": record has " +
                      std::to_string(fields.size()) + " columns, expected 10");
    }
    VcfRecord rec;
    rec.chrom = fields[0];
    try {
      rec.pos = std::stoull(fields[1]);
    } catch (const std::exception&) {
      throw Error("genomics", "bad-vcf", "line " + std::to_string(line_no) + ": bad POS");
    }
    rec.id = fields[2];
    if (fields[3].size() != 1 || fields[4].size() != 1) {
      throw Error("genomics", "bad-vcf",
                  "line " + std::to_string(line_no) + ": only single-base REF/ALT supported");
    }
    rec.ref_base = fields[3][0];
    rec.alt_base = fields[4][0];
    try {
      rec.qual = std::stoi(fields[5]);
    } catch (const std::exception&) {
      throw Error("genomics", "bad-vcf", "line " + std::to_string(line_no) + ": bad QUAL");
    }
    rec.filter = fields[6];
    if (fields[7] == ".") {
      rec.depth = 0;
    } else if (fields[7].rfind("DP=", 0) == 0) {
      rec.depth = static_cast<std::uint32_t>(std::stoul(fields[7].substr(3)));
    } else {
      throw Error("genomics", "bad-vcf",
                  "line " + std::to_string(line_no) + ": INFO outside the supported subset");
    }
    if (fields[8] != "GT") {
      throw Error("genomics", "bad-vcf",
                  "line " + std::to_string(line_no) + ": FORMAT must be GT");
    }
    if (fields[9] != "0/1" && fields[9] != "1/1") {
      throw Error("genomics", "bad-vcf",
                  "line " + std::to_string(line_no) + ": genotype must be 0/1 or 1/1");
    }
    rec.genotype = fields[9];
    doc.records.push_back(std::move(rec));
  }
  doc.sorted_on_parse = doc.is_sorted();
  return doc;
}

VcfDocument VcfDocument::from_bytes(ByteView data) {
  return from_text(std::string(data.begin(), data.end()));
}

std::string FilterPolicy::describe() const {
  std::ostringstream out;
  switch (mode) {
    case FilterMode::region:
      out << "mode=region";
      break;
    case FilterMode::count:
      out << "mode=count";
      break;
    case FilterMode::both:
      out << "mode=both";
      break;
  }
  out << ";regions=";
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (i > 0) out << ',';
    out << regions[i].chrom << ':' << regions[i].start << '-' << regions[i].end;
  }
  out << ";max_records=";
  if (max_records) {
    out << *max_records;
  } else {
    out << "none";
  }
  return out.str();
}

VcfDocument filter_vcf(const VcfDocument& doc, const FilterPolicy& policy) {
  if (!doc.is_sorted()) {
    throw Error("genomics", "unsorted-input", "filter_vcf requires a sorted document");
  }
  for (const auto& r : policy.regions) {
    if (r.start > r.end) {
      throw Error("genomics", "bad-region",
                  r.chrom + ":" + std::to_string(r.start) + "-" + std::to_string(r.end) +
                      " has start > end");
    }
  }

  VcfDocument out;
  out.meta = doc.meta;
  out.meta.push_back("##genovault_filter=" + policy.describe());
  out.sample_name = doc.sample_name;

  bool use_regions = policy.mode == FilterMode::region || policy.mode == FilterMode::both;
  bool use_count = policy.mode == FilterMode::count || policy.mode == FilterMode::both;
  std::uint64_t limit = use_count && policy.max_records ? *policy.max_records
                        : use_count                     ? 0
                                                        : doc.records.size();

  for (const auto& rec : doc.records) {
    if (use_count && out.records.size() >= limit) {
      break;
    }
    if (use_regions) {
      bool inside = false;
      for (const auto& region : policy.regions) {
        if (region.chrom == rec.chrom && region.start <= rec.pos && rec.pos <= region.end) {
          inside = true;
          break;
        }
      }
      if (!inside) {
        continue;
      }
    }
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace genovault::genomics
