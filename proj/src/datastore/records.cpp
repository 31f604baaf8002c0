// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "moelaw/datastore.hpp"
#include "moelaw/error.hpp"
#include "moelaw/json_io.hpp"

namespace moelaw {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, const std::string& column) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw DomainError("column " + column + ": '" + s + "' is not a number");
  }
  return v;
}

void check_record(const ExperimentRecord& r) {
  validate(r.point);
  if (!(r.loss > 0) || !std::isfinite(r.loss)) {
    throw DomainError("loss must be positive and finite");
  }
}

// Assigns ids, rejects duplicates, merges equal points, warns on units.
Campaign finish(std::vector<ExperimentRecord> rows,
                std::vector<std::size_t> row_numbers,
                std::vector<RowError>& rejected, const std::string& source) {
  std::vector<ExperimentRecord> kept;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    if (r.id.empty()) r.id = "row-" + std::to_string(row_numbers[i]);
    if (!seen.insert(r.id).second) {
      rejected.push_back({row_numbers[i], "duplicate id '" + r.id + "'"});
      continue;
    }
    kept.push_back(std::move(r));
  }

  Campaign c;
  c.provenance.kind = Provenance::Kind::Ingested;
  c.provenance.source = source;
  c.records = deduplicate(kept);
  std::size_t small_N = 0, small_D = 0;
  for (const auto& r : c.records) {
    small_N += r.point.N < 1e6;
    small_D += r.point.D < 1e8;
  }
  if (small_N > 0) {
    c.warnings.push_back(std::to_string(small_N) +
                         " record(s) have N < 1e6; sizes are raw parameter "
                         "counts, not millions or billions");
  }
  if (small_D > 0) {
    c.warnings.push_back(std::to_string(small_D) +
                         " record(s) have D < 1e8; data sizes are raw token "
                         "counts");
  }
  c.update_ranges();
  return c;
}

[[noreturn]] void all_rejected(const std::vector<RowError>& rejected) {
  throw SchemaError("all " + std::to_string(rejected.size()) +
                    " rows were rejected; first: row " +
                    std::to_string(rejected.front().row) + ": " +
                    rejected.front().message);
}

IngestResult ingest_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw SchemaError("empty input: no CSV header");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : {"N", "D", "Na", "G", "S", "loss"}) {
    if (!col.contains(name)) {
      throw SchemaError(std::string("missing required column '") + name + "'");
    }
  }

  IngestResult res;
  std::vector<ExperimentRecord> rows;
  std::vector<std::size_t> numbers;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv(line);
    try {
      if (cells.size() != header.size()) {
        throw DomainError("expected " + std::to_string(header.size()) +
                          " cells, got " + std::to_string(cells.size()));
      }
      ExperimentRecord r;
      const auto num = [&](const char* name) {
        return parse_double(cells[col.at(name)], name);
      };
      r.point = {num("N"), num("D"), num("Na"), num("G"), num("S")};
      r.loss = num("loss");
      if (col.contains("id")) r.id = cells[col.at("id")];
      if (col.contains("tags")) r.tags = parse_tags(cells[col.at("tags")]);
      check_record(r);
      rows.push_back(std::move(r));
      numbers.push_back(row);
    } catch (const std::exception& e) {
      res.rejected.push_back({row, e.what()});
    }
  }
  if (rows.empty() && !res.rejected.empty()) all_rejected(res.rejected);
  res.campaign = finish(std::move(rows), std::move(numbers), res.rejected,
                        source);
  return res;
}

IngestResult ingest_json(std::istream& in, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  const Json* arr = &doc;
  if (doc.is_object()) {
    if (!doc.contains("records")) throw SchemaError("missing key 'records'");
    arr = &doc.at("records");
  }
  if (!arr->is_array()) throw SchemaError("'records' must be an array");

  IngestResult res;
  std::vector<ExperimentRecord> rows;
  std::vector<std::size_t> numbers;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    try {
      ExperimentRecord r = record_from_json(arr->at(i));
      check_record(r);
      rows.push_back(std::move(r));
      numbers.push_back(i + 1);
    } catch (const SchemaError& e) {
      // A missing key on the first row is a schema problem, not a bad row.
      if (i == 0) throw;
      res.rejected.push_back({i + 1, e.what()});
    } catch (const std::exception& e) {
      res.rejected.push_back({i + 1, e.what()});
    }
  }
  if (rows.empty() && !res.rejected.empty()) all_rejected(res.rejected);
  res.campaign = finish(std::move(rows), std::move(numbers), res.rejected,
                        source);
  return res;
}

}  // namespace

bool ExperimentRecord::has_tag(const std::string& key,
                               const std::string& value) const {
  const auto it = tags.find(key);
  return it != tags.end() && it->second == value;
}

Tags parse_tags(std::string_view text) {
  Tags tags;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string item = trim(text.substr(pos, end - pos));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        tags[item] = "";
      } else {
        tags[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
      }
    }
    pos = end + 1;
  }
  return tags;
}

std::string format_tags(const Tags& tags) {
  std::string out;
  for (const auto& [k, v] : tags) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

void Campaign::update_ranges() {
  for (Factor f : {Factor::N, Factor::D, Factor::Na, Factor::G, Factor::S}) {
    FactorRange r{0, 0};
    bool first = true;
    for (const auto& rec : records) {
      const double v = rec.point.get(f);
      if (first) {
        r = {v, v};
        first = false;
      } else {
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
      }
    }
    ranges[static_cast<std::size_t>(f)] = r;
  }
}

std::vector<ExperimentRecord> deduplicate(
    std::span<const ExperimentRecord> records) {
  std::vector<ExperimentRecord> out;
  std::vector<std::size_t> counts;
  std::map<std::array<double, 5>, std::size_t> index;
  for (const auto& r : records) {
    const std::array<double, 5> key{r.point.N, r.point.D, r.point.Na,
                                    r.point.G, r.point.S};
    const auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.size());
      out.push_back(r);
      counts.push_back(1);
    } else {
      out[it->second].loss += r.loss;
      ++counts[it->second];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (counts[i] > 1) {
      out[i].loss /= static_cast<double>(counts[i]);
      out[i].tags["count"] = std::to_string(counts[i]);
    }
  }
  return out;
}

IngestResult ingest(std::istream& in, DataFormat format,
                    const std::string& source) {
  return format == DataFormat::CSV ? ingest_csv(in, source)
                                   : ingest_json(in, source);
}

IngestResult ingest_file(const std::filesystem::path& path,
                         std::optional<DataFormat> format) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  if (!format) {
    format = path.extension() == ".json" ? DataFormat::JSON : DataFormat::CSV;
  }
  return ingest(in, *format, path.string());
}

void write_csv(std::span<const ExperimentRecord> records, std::ostream& out) {
  out << "N,D,Na,G,S,loss,id,tags\n";
  const auto old = out.precision(17);
  for (const auto& r : records) {
    out << r.point.N << ',' << r.point.D << ',' << r.point.Na << ','
        << r.point.G << ',' << r.point.S << ',' << r.loss << ',' << r.id << ','
        << format_tags(r.tags) << '\n';
  }
  out.precision(old);
}

}  // namespace moelaw
