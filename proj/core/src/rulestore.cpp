#include "nestquad/rulestore.hpp"

#include "nestquad/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <unistd.h>

#ifndef NESTQUAD_VERSION
#define NESTQUAD_VERSION "0.0.0"
#endif

namespace nestquad {

using nlohmann::json;

namespace {

constexpr double kVerificationFloor = 1e-15;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json bound_to_json(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

double bound_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::Schema, "bad domain bound '" + s + "'");
  }
  return j.get<double>();
}

json family_to_json(const WeightFamily& family) {
  json params = json::object();
  for (const auto& [name, value] : family.params()) params[name] = value;
  json out = {{"kind", family.kind_name()}, {"params", params}};
  if (family.kind() == FamilyKind::Custom) {
    out["a"] = family.custom_a();
    out["b"] = family.custom_b();
    out["domain"] = {bound_to_json(family.domain().lo), bound_to_json(family.domain().hi)};
  }
  return out;
}

WeightFamily family_from_json(const json& j) {
  const FamilyKind kind = parse_family_kind(j.at("kind").get<std::string>());
  if (kind == FamilyKind::Custom) {
    const auto& dom = j.at("domain");
    return WeightFamily::custom(j.at("a").get<std::vector<double>>(),
                                j.at("b").get<std::vector<double>>(),
                                {bound_from_json(dom.at(0)), bound_from_json(dom.at(1))});
  }
  const json params = j.value("params", json::object());
  std::vector<double> values;
  if (kind == FamilyKind::Jacobi) {
    values = {params.value("alpha", 0.0), params.value("beta", 0.0)};
  } else if (kind == FamilyKind::GeneralizedHermite || kind == FamilyKind::GeneralizedLaguerre) {
    values = {params.value("rho", 0.0)};
  }
  return make_family(kind, values);
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorKind::Numerical, std::string("refusing to store non-finite ") + what +
                                            " at index " + std::to_string(i));
    }
  }
}

double stored_residual(const RuleRecord& record) {
  if (const auto* pair = std::get_if<NestedRulePair>(&record.payload)) {
    return std::hypot(pair->coarse.residual_norm, pair->fine.residual_norm);
  }
  return std::get<QuadratureRule>(record.payload).residual_norm;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read error on " + path.string());
  return os.str();
}

}  // namespace

std::string rule_mode_name(RuleMode mode) {
  switch (mode) {
    case RuleMode::Kronrod: return "kronrod";
    case RuleMode::Patterson: return "patterson";
    case RuleMode::Gauss: return "gauss";
  }
  return "gauss";
}

RuleMode parse_rule_mode(const std::string& name) {
  if (name == "kronrod") return RuleMode::Kronrod;
  if (name == "patterson") return RuleMode::Patterson;
  if (name == "gauss") return RuleMode::Gauss;
  throw Error(ErrorKind::Schema, "unknown rule mode '" + name + "'");
}

const WeightFamily& RuleRecord::family() const { return finest().family; }

const QuadratureRule& RuleRecord::finest() const {
  if (const auto* pair = std::get_if<NestedRulePair>(&payload)) return pair->fine;
  return std::get<QuadratureRule>(payload);
}

RuleRecord make_record(const QuadratureRule& rule, RuleMode mode,
                       const OptimizerConfig& config, int iterations, int base_size) {
  RuleRecord r;
  r.mode = mode;
  r.payload = rule;
  r.base_size = base_size;
  r.certification = {rule.exactness_degree, rule.residual_norm, config.epsilon,
                     config.penalty_scale, config.weight_floor};
  r.provenance = {std::string("nestquad ") + NESTQUAD_VERSION, utc_timestamp(), iterations};
  return r;
}

RuleRecord make_record(const NestedRulePair& pair, const OptimizerConfig& config,
                       int iterations) {
  RuleRecord r;
  r.mode = RuleMode::Kronrod;
  r.payload = pair;
  r.certification = {pair.fine.exactness_degree,
                     std::hypot(pair.coarse.residual_norm, pair.fine.residual_norm),
                     config.epsilon, config.penalty_scale, config.weight_floor};
  r.provenance = {std::string("nestquad ") + NESTQUAD_VERSION, utc_timestamp(), iterations};
  return r;
}

double verification_threshold(double stored_residual) {
  return std::max(10.0 * stored_residual, kVerificationFloor);
}

double reverify(const RuleRecord& record) {
  const WeightFamily& family = record.family();
  if (const auto* pair = std::get_if<NestedRulePair>(&record.payload)) {
    const int degree = std::max({1, pair->coarse.exactness_degree, pair->fine.exactness_degree});
    return pair_residual_norm(*pair, recurrence_coefficients(family, degree));
  }
  const auto& rule = std::get<QuadratureRule>(record.payload);
  const int degree = std::max(1, rule.exactness_degree);
  return verify_rule(rule, recurrence_coefficients(family, degree), rule.exactness_degree).norm;
}

std::string to_json(const RuleRecord& record) {
  json data;
  if (const auto* pair = std::get_if<NestedRulePair>(&record.payload)) {
    data = {{"n1", pair->coarse.size()},
            {"n2", pair->fine.size()},
            {"nodes", pair->fine.nodes},
            {"weights", pair->fine.weights},
            {"coarse_weights", pair->coarse.weights},
            {"subset_map", pair->subset_map},
            {"alpha1", pair->coarse.exactness_degree},
            {"alpha2", pair->fine.exactness_degree},
            {"coarse_residual_norm", pair->coarse.residual_norm},
            {"fine_residual_norm", pair->fine.residual_norm},
            {"residual_norm", stored_residual(record)},
            {"weight_floor_relaxed", pair->fine.weight_floor_relaxed}};
  } else {
    const auto& rule = std::get<QuadratureRule>(record.payload);
    data = {{"n2", rule.size()},
            {"nodes", rule.nodes},
            {"weights", rule.weights},
            {"alpha2", rule.exactness_degree},
            {"residual_norm", rule.residual_norm},
            {"weight_floor_relaxed", rule.weight_floor_relaxed}};
    if (record.base_size > 0) data["n1"] = record.base_size;
  }
  const auto& c = record.certification;
  const json doc = {
      {"schema_version", record.schema_version},
      {"kind", record.is_pair() ? "pair" : "rule"},
      {"mode", rule_mode_name(record.mode)},
      {"family", family_to_json(record.family())},
      {"data", data},
      {"certification",
       {{"alpha", c.alpha},
        {"residual_norm", c.residual_norm},
        {"epsilon", c.epsilon},
        {"A", c.penalty_scale},
        {"weight_floor", c.weight_floor}}},
      {"provenance",
       {{"generator", record.provenance.generator},
        {"timestamp", record.provenance.timestamp},
        {"iterations", record.provenance.iterations}}}};
  return doc.dump(2) + "\n";
}

RuleRecord from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("malformed JSON: ") + e.what());
  }
  try {
    RuleRecord r;
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) {
      throw Error(ErrorKind::Schema, "unsupported schema_version " +
                                         std::to_string(r.schema_version) + " (expected " +
                                         std::to_string(kSchemaVersion) + ")");
    }
    r.mode = parse_rule_mode(doc.value("mode", std::string("gauss")));
    const WeightFamily family = family_from_json(doc.at("family"));
    const json& data = doc.at("data");
    const std::string kind = doc.at("kind").get<std::string>();

    QuadratureRule fine;
    fine.family = family;
    fine.nodes = data.at("nodes").get<std::vector<double>>();
    fine.weights = data.at("weights").get<std::vector<double>>();
    fine.exactness_degree = data.at("alpha2").get<int>();
    fine.weight_floor_relaxed = data.value("weight_floor_relaxed", false);
    if (fine.nodes.size() != fine.weights.size()) {
      throw Error(ErrorKind::Schema, "nodes and weights differ in length");
    }
    if (kind == "pair") {
      NestedRulePair pair;
      fine.residual_norm = data.at("fine_residual_norm").get<double>();
      pair.fine = fine;
      pair.subset_map = data.at("subset_map").get<std::vector<int>>();
      pair.coarse.family = family;
      pair.coarse.weights = data.at("coarse_weights").get<std::vector<double>>();
      pair.coarse.exactness_degree = data.at("alpha1").get<int>();
      pair.coarse.residual_norm = data.at("coarse_residual_norm").get<double>();
      pair.coarse.weight_floor_relaxed = fine.weight_floor_relaxed;
      if (pair.subset_map.size() != pair.coarse.weights.size()) {
        throw Error(ErrorKind::Schema, "subset_map and coarse_weights differ in length");
      }
      for (int idx : pair.subset_map) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= fine.size()) {
          throw Error(ErrorKind::Schema, "subset_map entry out of range");
        }
        pair.coarse.nodes.push_back(fine.nodes[static_cast<std::size_t>(idx)]);
      }
      r.payload = std::move(pair);
    } else if (kind == "rule") {
      fine.residual_norm = data.at("residual_norm").get<double>();
      r.base_size = data.value("n1", 0);
      r.payload = std::move(fine);
    } else {
      throw Error(ErrorKind::Schema, "unknown record kind '" + kind + "'");
    }
    const json& c = doc.at("certification");
    r.certification = {c.at("alpha").get<int>(), c.at("residual_norm").get<double>(),
                       c.at("epsilon").get<double>(), c.at("A").get<double>(),
                       c.at("weight_floor").get<double>()};
    const json p = doc.value("provenance", json::object());
    r.provenance = {p.value("generator", std::string()), p.value("timestamp", std::string()),
                    p.value("iterations", 0)};
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("record does not match schema: ") + e.what());
  }
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : ".";
  const std::filesystem::path tmp =
      dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::Io, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot move record into place at " + path.string());
  }
}

void save(const RuleRecord& record, const std::filesystem::path& path) {
  if (const auto* pair = std::get_if<NestedRulePair>(&record.payload)) {
    require_finite(pair->fine.nodes, "node");
    require_finite(pair->fine.weights, "weight");
    require_finite(pair->coarse.weights, "coarse weight");
  } else {
    const auto& rule = std::get<QuadratureRule>(record.payload);
    require_finite(rule.nodes, "node");
    require_finite(rule.weights, "weight");
  }
  if (!std::isfinite(stored_residual(record))) {
    throw Error(ErrorKind::Numerical, "refusing to store a non-finite residual norm");
  }
  atomic_write(path, to_json(record));
}

RuleRecord load(const std::filesystem::path& path, LoadOptions options) {
  RuleRecord record;
  try {
    record = from_json(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  if (options.verify) {
    const double stored = stored_residual(record);
    const double actual = reverify(record);
    if (!(actual <= verification_threshold(stored))) {
      std::ostringstream os;
      os << path.string() << ": re-verified residual " << std::setprecision(3) << actual
         << " exceeds 10x the stored " << stored;
      throw Error(ErrorKind::Integrity, os.str());
    }
  }
  return record;
}

CatalogKey catalog_key(const RuleRecord& record) {
  CatalogKey key;
  key.family = record.family().label();
  key.mode = record.mode;
  if (const auto* pair = std::get_if<NestedRulePair>(&record.payload)) {
    key.n1 = static_cast<int>(pair->coarse.size());
    key.n2 = static_cast<int>(pair->fine.size());
  } else {
    key.n1 = record.base_size;
    key.n2 = static_cast<int>(record.finest().size());
  }
  return key;
}

Catalog catalog_scan(const std::filesystem::path& dir) {
  Catalog catalog;
  catalog.directory = dir;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    catalog.warnings.push_back(dir.string() + ": not a readable directory");
    return catalog;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) catalog.warnings.push_back(dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    try {
      RuleRecord record = load(file);
      CatalogKey key = catalog_key(record);
      auto it = catalog.entries.find(key);
      if (it != catalog.entries.end()) {
        catalog.warnings.push_back(file.string() + ": duplicate of " + it->second.path.string() +
                                   ", keeping the later file");
      }
      catalog.entries.insert_or_assign(key, CatalogEntry{file, std::move(record)});
    } catch (const Error& e) {
      catalog.warnings.push_back("skipped " + file.string() + ": " + e.what());
    }
  }
  return catalog;
}

std::string grid_to_json(const SparseGrid& grid) {
  json nodes = json::array();
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    const auto x = grid.points.node(p);
    nodes.push_back(std::vector<double>(x.begin(), x.end()));
  }
  const WeightFamily family =
      grid.source.levels.empty() ? WeightFamily::legendre() : grid.source.levels.front().family;
  const json doc = {{"d", grid.dim},
                    {"k", grid.level},
                    {"family_ref", family_to_json(family)},
                    {"nested", grid.source.nested},
                    {"nodes", nodes},
                    {"weights", grid.points.weights}};
  return doc.dump(2) + "\n";
}

void save_grid(const SparseGrid& grid, const std::filesystem::path& path) {
  atomic_write(path, grid_to_json(grid));
}

LoadedGrid load_grid(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    const json doc = json::parse(text);
    LoadedGrid g;
    g.dim = doc.at("d").get<int>();
    g.level = doc.at("k").get<int>();
    g.family = family_from_json(doc.at("family_ref"));
    g.points.dim = g.dim;
    for (const auto& node : doc.at("nodes")) {
      const auto x = node.get<std::vector<double>>();
      if (static_cast<int>(x.size()) != g.dim) {
        throw Error(ErrorKind::Schema, path.string() + ": node dimension mismatch");
      }
      g.points.coords.insert(g.points.coords.end(), x.begin(), x.end());
    }
    g.points.weights = doc.at("weights").get<std::vector<double>>();
    if (g.points.weights.size() * static_cast<std::size_t>(g.dim) != g.points.coords.size()) {
      throw Error(ErrorKind::Schema, path.string() + ": nodes and weights differ in count");
    }
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, path.string() + ": not a grid file: " + e.what());
  }
}

void write_rule_csv(const QuadratureRule& rule, std::ostream& out) {
  out << "node,weight\n" << std::setprecision(17);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    out << rule.nodes[q] << "," << rule.weights[q] << "\n";
  }
}

}  // namespace nestquad
