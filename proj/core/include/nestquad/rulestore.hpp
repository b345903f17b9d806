#pragma once

#include "nestquad/gauss.hpp"
#include "nestquad/nested_optimizer.hpp"
#include "nestquad/sparse_grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace nestquad {

inline constexpr int kSchemaVersion = 1;

enum class RuleMode { Kronrod, Patterson, Gauss };

std::string rule_mode_name(RuleMode mode);
RuleMode parse_rule_mode(const std::string& name);

struct Certification {
  int alpha = 0;
  double residual_norm = 0.0;
  double epsilon = 1e-12;
  double penalty_scale = 1e3;
  double weight_floor = 1e-6;
};

struct Provenance {
  std::string generator;
  std::string timestamp;
  int iterations = 0;
};

struct RuleRecord {
  int schema_version = kSchemaVersion;
  RuleMode mode = RuleMode::Gauss;
  std::variant<QuadratureRule, NestedRulePair> payload;
  /// Size of the rule this one extends (Patterson records).
  int base_size = 0;
  Certification certification;
  Provenance provenance;

  bool is_pair() const { return std::holds_alternative<NestedRulePair>(payload); }
  const WeightFamily& family() const;
  /// The single rule, or the fine rule of a pair.
  const QuadratureRule& finest() const;
};

RuleRecord make_record(const QuadratureRule& rule, RuleMode mode,
                       const OptimizerConfig& config, int iterations, int base_size = 0);
RuleRecord make_record(const NestedRulePair& pair, const OptimizerConfig& config,
                       int iterations);

/// Residual allowed on re-verification of a stored norm.
double verification_threshold(double stored_residual);

/// Re-verifies the record's payload against its family.
double reverify(const RuleRecord& record);

std::string to_json(const RuleRecord& record);
RuleRecord from_json(const std::string& text);

/// Atomic write: temporary file in the same directory, then rename.
void save(const RuleRecord& record, const std::filesystem::path& path);

struct LoadOptions {
  bool verify = true;
};

RuleRecord load(const std::filesystem::path& path, LoadOptions options = {});

struct CatalogKey {
  std::string family;
  int n1 = 0;
  int n2 = 0;
  RuleMode mode = RuleMode::Gauss;

  friend auto operator<=>(const CatalogKey&, const CatalogKey&) = default;
};

CatalogKey catalog_key(const RuleRecord& record);

struct CatalogEntry {
  std::filesystem::path path;
  RuleRecord record;
};

struct Catalog {
  std::filesystem::path directory;
  std::map<CatalogKey, CatalogEntry> entries;
  std::vector<std::string> warnings;

  std::size_t size() const { return entries.size(); }
};

/// Indexes every *.json file in `dir`. Files are read in name order, so
/// later names win on duplicate keys.
Catalog catalog_scan(const std::filesystem::path& dir);

std::string grid_to_json(const SparseGrid& grid);
void save_grid(const SparseGrid& grid, const std::filesystem::path& path);

struct LoadedGrid {
  int dim = 0;
  int level = 0;
  WeightFamily family = WeightFamily::legendre();
  PointSet points;
};

LoadedGrid load_grid(const std::filesystem::path& path);

/// node,weight per line after a header row.
void write_rule_csv(const QuadratureRule& rule, std::ostream& out);

/// Writes `content` to `path` through a temporary file and rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace nestquad
