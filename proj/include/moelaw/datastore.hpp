// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment records, campaigns, the constants registry and report tables.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moelaw/constants.hpp"
#include "moelaw/factors.hpp"

namespace moelaw {

// ---------------------------------------------------------------------------
// Records and campaigns
// ---------------------------------------------------------------------------

using Tags = std::map<std::string, std::string>;

struct ExperimentRecord {
  std::string id;
  FactorPoint point;
  double loss = 0;
  Tags tags;

  /// True if tags[key] == value.
  bool has_tag(const std::string& key, const std::string& value) const;

  bool operator==(const ExperimentRecord&) const = default;
};

/// "k=v;k=v" <-> map. Keys and values may not contain ';' or '='.
Tags parse_tags(std::string_view text);
std::string format_tags(const Tags& tags);

struct FactorRange {
  double min = 0;
  double max = 0;
  bool operator==(const FactorRange&) const = default;
};

struct Provenance {
  enum class Kind { Ingested, Synthetic };
  Kind kind = Kind::Ingested;
  std::string source;  // path or stream name, when ingested
  // Synthetic only.
  ScalingConstants constants;
  double sigma = 0;
  std::uint64_t seed = 0;
};

struct Campaign {
  std::vector<ExperimentRecord> records;
  Provenance provenance;
  std::array<FactorRange, 5> ranges{};  // indexed by Factor
  std::vector<std::string> warnings;

  /// Recomputes `ranges` from the records.
  void update_ranges();
  FactorRange range(Factor f) const {
    return ranges[static_cast<std::size_t>(f)];
  }
};

/// Merges records with identical points: losses are averaged, the first id
/// and tags are kept, and tag count=<n> records how many were merged.
std::vector<ExperimentRecord> deduplicate(
    std::span<const ExperimentRecord> records);

enum class DataFormat { CSV, JSON };

struct RowError {
  std::size_t row = 0;  // 1-based data row (CSV) or array index + 1 (JSON)
  std::string message;
};

struct IngestResult {
  Campaign campaign;
  std::vector<RowError> rejected;
};

/// Reads N, D, Na, G, S, loss (raw units) plus optional id and tags.
/// Invalid rows are collected in `rejected`; throws SchemaError if a
/// required column is missing or if every row is rejected. Duplicate points
/// are averaged. Warns when N < 1e6 or D < 1e8.
IngestResult ingest(std::istream& in, DataFormat format,
                    const std::string& source = "stream");
IngestResult ingest_file(const std::filesystem::path& path,
                         std::optional<DataFormat> format = std::nullopt);

/// Header N,D,Na,G,S,loss,id,tags; numbers round-trip exactly.
void write_csv(std::span<const ExperimentRecord> records, std::ostream& out);

// ---------------------------------------------------------------------------
// Synthetic campaigns
// ---------------------------------------------------------------------------

struct CampaignLayout {
  // Fit tier ranges.
  FactorRange N{133e6, 3.4e9};
  FactorRange D{10e9, 50e9};
  FactorRange Na{30e6, 2.2e9};
  FactorRange G{1, 20};
  FactorRange S{0, 0.7};
  // Validation tier ranges.
  FactorRange val_N{2.4e9, 9e9};
  FactorRange val_D{10e9, 100e9};
  FactorRange val_Na{453e6, 6.6e9};

  std::size_t fit_points = 268;
  std::size_t g_small_points = 90;
  std::size_t validation_points = 88;

  std::size_t total() const {
    return fit_points + g_small_points + validation_points;
  }
};

/// Number of fit-tier points placed on controlled sweeps before the random
/// fill: 30 N-D, 48 Na, 24 S and 16 G points.
inline constexpr std::size_t kStructuredFitPoints = 118;

/// Deterministic campaign: loss = joint law + N(0, sigma). Point placement
/// depends on `seed` only, so campaigns differing in sigma share points.
/// Tags: tier=fit|g-small|validation and sweep=nd|na|s|g|random.
/// Throws DomainError on an invalid layout; ranges outside the study grid
/// are allowed and noted in `warnings`.
Campaign generate_campaign(const ScalingConstants& constants,
                           const CampaignLayout& layout, double sigma,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Constants registry
// ---------------------------------------------------------------------------

inline constexpr const char* kPaperLabel = "paper-table-5";
inline constexpr const char* kRegistryEnv = "MOELAW_REGISTRY_DIR";

struct RegistryEntry {
  std::string label;
  ScalingConstants constants;
  std::string provenance;  // free text, e.g. "fit of campaign.csv"
  bool builtin = false;
};

/// One JSON document per label: <dir>/<label>.json.
class ConstantsRegistry {
 public:
  /// Uses `dir`, else $MOELAW_REGISTRY_DIR, else ./moelaw-registry.
  explicit ConstantsRegistry(std::optional<std::filesystem::path> dir = {});

  const std::filesystem::path& dir() const { return dir_; }

  /// Throws UnknownLabelError.
  RegistryEntry load(const std::string& label) const;

  /// Throws DomainError for the built-in label or an unsafe label.
  void save(const std::string& label, const ScalingConstants& constants,
            const std::string& provenance = "") const;

  /// Built-in first, then saved labels in lexical order.
  std::vector<std::string> labels() const;

 private:
  std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------
// Report tables
// ---------------------------------------------------------------------------

struct ModelSpec {
  std::string name;
  double Na = 0;
  double N = 0;
  // Deployed expert layout, shown in table3 when known.
  std::optional<int> n_s;
  std::optional<int> n_k;
};

/// The nine open MoE models used in the reference tables.
std::vector<ModelSpec> reference_models();

/// "Name:Na:N" with optional suffixes, e.g. "Kimi-K2:32B:1T".
ModelSpec parse_model_spec(std::string_view text);

enum class TableKind { Table3, Table4 };

TableKind parse_table_kind(std::string_view name);

struct RenderedTable {
  std::string markdown;
  std::string csv;
};

/// table3: G and S practical ranges at thresholds.front().
/// table4: theoretical ratio plus one efficiency-aware column per threshold.
/// Failing rows carry "error: <message>" cells.
RenderedTable render_table(TableKind kind, std::span<const ModelSpec> models,
                           const ScalingConstants& constants,
                           std::span<const double> thresholds);

/// "1.5B", "30M", "1T", "2e10" -> raw count. Throws DomainError.
double parse_scaled_number(std::string_view text);

/// 3.2e10 -> "32B", 2.1e10 -> "21B", 5.1e9 -> "5.1B".
std::string format_scaled_number(double v, int decimals = -1);

}  // namespace moelaw
