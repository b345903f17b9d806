#include "cli.hpp"

#include "nestquad/nestquad.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace nestquad::cli {

namespace fs = std::filesystem;

namespace {

// Failures that should end with a specific exit code and a one-line message.
struct ExitRequest {
  int code;
  std::string message;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::Feasibility:
      return kConvergence;
    case ErrorKind::Io:
    case ErrorKind::Schema:
    case ErrorKind::Integrity:
      return kIo;
    default:
      return kUsage;
  }
}

WeightFamily parse_family(std::string name, std::vector<double> params) {
  // Shorthand such as "hermite-rho1" or "laguerre-rho0.5".
  if (const auto pos = name.find("-rho"); pos != std::string::npos) {
    const std::string value = name.substr(pos + 4);
    name = name.substr(0, pos);
    try {
      std::size_t used = 0;
      params = {std::stod(value, &used)};
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParameterDomain, "cannot read rho from '" + value + "'");
    }
  }
  const FamilyKind kind = parse_family_kind(name);
  if (kind == FamilyKind::Custom) {
    throw Error(ErrorKind::ParameterDomain, "custom families are only readable from rule files");
  }
  return make_family(kind, params);
}

std::string file_stem(const WeightFamily& family) {
  std::string out = family.label();
  for (char& c : out) {
    if (c == '(' || c == ')' || c == ',') c = '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

RuleRecord load_input(const fs::path& path, bool verify) {
  try {
    return load(path, LoadOptions{verify});
  } catch (const Error& e) {
    throw ExitRequest{kIo, e.what()};
  }
}

struct FamilyOptions {
  std::string name = "legendre";
  std::vector<double> params;

  void attach(CLI::App* app) {
    app->add_option("--family", name, "legendre, chebyshev, jacobi, hermite, laguerre or e.g. hermite-rho1");
    app->add_option("--params", params, "Comma-separated family parameters")->delimiter(',');
  }
  WeightFamily family() const { return parse_family(name, params); }
};

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  FamilyOptions family;
  std::vector<int> n1;
  double eps = 1e-12;
  std::optional<int> alpha2_init;
  bool allow_negative = false;
  std::string out;
  std::string log;
  unsigned jobs = 0;
};

struct GenerateOutcome {
  std::optional<NestedResult> result;
  std::string error;
  int code = kOk;
};

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.n1.empty()) throw ExitRequest{kUsage, "--n1 is required"};
  for (int n : opt.n1) {
    if (n < 1) throw ExitRequest{kUsage, "--n1 must be >= 1, got " + std::to_string(n)};
  }
  const WeightFamily family = opt.family.family();
  OptimizerConfig config;
  config.epsilon = opt.eps;
  config.alpha2_initial = opt.alpha2_init;
  config.allow_negative_weights = opt.allow_negative;
  config.validate();

  const bool batch = opt.n1.size() > 1;
  const fs::path out_path = opt.out;
  const bool to_dir = batch || fs::is_directory(out_path);
  if (to_dir) {
    std::error_code ec;
    fs::create_directories(out_path, ec);
    if (ec) throw ExitRequest{kIo, "cannot create directory " + out_path.string()};
  }

  const int top = *std::max_element(opt.n1.begin(), opt.n1.end());
  const RecurrenceTable table = recurrence_coefficients(family, 4 * top + 4);
  std::vector<GenerateOutcome> outcomes(opt.n1.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < opt.n1.size(); i = next++) {
      const int n1 = opt.n1[i];
      std::ofstream log;
      IterationSink sink;
      if (!opt.log.empty()) {
        const fs::path lp = batch ? with_suffix(opt.log, "_n1-" + std::to_string(n1)) : fs::path(opt.log);
        log.open(lp);
        if (!log) {
          outcomes[i] = {std::nullopt, "cannot write log " + lp.string(), kIo};
          continue;
        }
        log << "iteration,residual_norm,newton_decrement,c_k,lambda,alpha2\n"
            << std::setprecision(17);
        sink = [&log](const IterationRecord& r) {
          log << r.iteration << "," << r.residual_norm << "," << r.newton_decrement << ","
              << r.c_k << "," << r.lambda << "," << r.alpha2 << "\n";
        };
      }
      try {
        outcomes[i].result = generate_nested(n1, table, config, sink);
      } catch (const Error& e) {
        outcomes[i] = {std::nullopt, e.what(), exit_code_for(e.kind())};
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned count =
      std::min<unsigned>(opt.jobs > 0 ? opt.jobs : hw, static_cast<unsigned>(opt.n1.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }

  int status = kOk;
  for (std::size_t i = 0; i < opt.n1.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.result) {
      err << "n1=" << opt.n1[i] << ": " << o.error << "\n";
      status = std::max(status, o.code);
      continue;
    }
    const NestedRulePair& pair = o.result->pair;
    const GenerationReport& rep = o.result->report;
    const fs::path target =
        to_dir ? out_path / (file_stem(family) + "_kronrod_n1-" + std::to_string(opt.n1[i]) + ".json")
               : out_path;
    OptimizerConfig used = config;
    used.weight_floor = rep.weight_floor;
    try {
      save(make_record(pair, used, rep.total_iterations), target);
    } catch (const Error& e) {
      err << e.what() << "\n";
      status = std::max(status, static_cast<int>(kIo));
      continue;
    }
    out << "n1=" << pair.coarse.size() << " n2=" << pair.fine.size()
        << " alpha1=" << pair.coarse.exactness_degree << " alpha2=" << pair.fine.exactness_degree
        << " residual=" << fmt(pair_residual_norm(pair, table)) << " iterations=" << rep.total_iterations
        << " time=" << fmt(rep.wall_seconds) << "s\n";
  }
  return status;
}

// ------------------------------------------------------------------ extend

struct ExtendOptions {
  std::string in;
  int steps = 1;
  bool prune = false;
  std::string out;
  double eps = 1e-12;
};

int cmd_extend(const ExtendOptions& opt, std::ostream& out, std::ostream&) {
  if (opt.steps < 1) throw ExitRequest{kUsage, "--steps must be >= 1"};
  const RuleRecord seed = load_input(opt.in, true);
  QuadratureRule base = seed.finest();
  OptimizerConfig config;
  config.epsilon = opt.eps;
  const fs::path dir = opt.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ExitRequest{kIo, "cannot create directory " + dir.string()};

  const int top = static_cast<int>(base.size() + 1) * (1 << opt.steps) * 2;
  const RecurrenceTable table = recurrence_coefficients(base.family, top);
  for (int s = 0; s < opt.steps; ++s) {
    const PattersonResult ext = extend_patterson(base, table, config);
    OptimizerConfig used = config;
    used.weight_floor = ext.report.weight_floor;
    const auto n = ext.rule.size();
    save(make_record(ext.rule, RuleMode::Patterson, used, ext.report.total_iterations,
                     static_cast<int>(base.size())),
         dir / (file_stem(base.family) + "_patterson_n" + std::to_string(n) + ".json"));
    out << "n2=" << n << " alpha2=" << ext.rule.exactness_degree
        << " residual=" << fmt(ext.rule.residual_norm) << " iterations=" << ext.report.total_iterations
        << " time=" << fmt(ext.report.wall_seconds) << "s\n";
    base = ext.rule;
  }
  if (opt.prune) {
    const QuadratureRule pruned = prune_negligible(base, table, config);
    if (pruned.size() != base.size()) {
      save(make_record(pruned, RuleMode::Patterson, config, 0),
           dir / (file_stem(base.family) + "_patterson_n" + std::to_string(base.size()) +
                  "_pruned.json"));
    }
    out << "pruned n2=" << pruned.size() << " (from " << base.size()
        << ") residual=" << fmt(pruned.residual_norm) << "\n";
  }
  return kOk;
}

// ------------------------------------------------------------------- gauss

struct GaussOptions {
  FamilyOptions family;
  int n = 0;
  std::string out;
};

int cmd_gauss(const GaussOptions& opt, std::ostream& out, std::ostream&) {
  if (opt.n < 1) throw ExitRequest{kUsage, "--n must be >= 1"};
  const WeightFamily family = opt.family.family();
  const QuadratureRule rule = gauss_rule(recurrence_coefficients(family, 2 * opt.n), opt.n);
  if (!opt.out.empty()) {
    if (fs::path(opt.out).extension() == ".csv") {
      std::ostringstream os;
      write_rule_csv(rule, os);
      atomic_write(opt.out, os.str());
    } else {
      save(make_record(rule, RuleMode::Gauss, OptimizerConfig{}, 0), opt.out);
    }
  }
  out << "n=" << rule.size() << " alpha=" << rule.exactness_degree
      << " residual=" << fmt(rule.residual_norm) << "\n";
  return kOk;
}

// ------------------------------------------------------------------ verify

struct VerifyOptions {
  std::string in;
  std::optional<int> alpha;
  bool circle = false;
};

int report_moments(const std::string& label, const VerificationReport& rep, double threshold,
                   std::ostream& out) {
  int bad = 0;
  out << label << " moment residuals\n";
  for (std::size_t j = 0; j < rep.moment_residuals.size(); ++j) {
    const double r = rep.moment_residuals[j];
    const bool offending = std::abs(r) > threshold;
    bad += offending ? 1 : 0;
    out << "  " << std::setw(4) << j << "  " << std::setw(12) << fmt(r) << (offending ? "  <- offending" : "")
        << "\n";
  }
  out << label << " norm " << fmt(rep.norm) << "\n";
  return bad;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  const RuleRecord record = load_input(opt.in, false);
  const QuadratureRule& fine = record.finest();
  if (opt.circle) {
    try {
      const double deviation = circle_theorem_deviation(fine);
      out << "circle-theorem deviation " << fmt(deviation) << "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnsupportedFamily) throw;
      err << "unsupported-family: " << e.what() << "\n";
      return kUsage;
    }
  }
  const double threshold = verification_threshold(record.certification.residual_norm);
  double norm = 0.0;
  if (const auto* pair = std::get_if<NestedRulePair>(&record.payload)) {
    const int a1 = pair->coarse.exactness_degree;
    const int a2 = opt.alpha.value_or(pair->fine.exactness_degree);
    const RecurrenceTable table = recurrence_coefficients(fine.family, std::max({1, a1, a2}));
    const auto r1 = verify_rule(pair->coarse, table, a1);
    const auto r2 = verify_rule(pair->fine, table, a2);
    report_moments("coarse", r1, threshold, out);
    report_moments("fine", r2, threshold, out);
    norm = std::hypot(r1.norm, r2.norm);
  } else {
    const int a = opt.alpha.value_or(fine.exactness_degree);
    const RecurrenceTable table = recurrence_coefficients(fine.family, std::max(1, a));
    norm = verify_rule(fine, table, a).norm;
    report_moments("rule", verify_rule(fine, table, a), threshold, out);
  }
  out << "norm " << fmt(norm) << " stored " << fmt(record.certification.residual_norm)
      << " threshold " << fmt(threshold) << "\n";
  if (!(norm <= threshold)) {
    err << "verification failed: residual " << fmt(norm) << " exceeds " << fmt(threshold) << "\n";
    return kVerification;
  }
  out << "verified\n";
  return kOk;
}

// ------------------------------------------------------------- sparse-grid

struct SparseGridOptions {
  FamilyOptions family;
  int d = 0;
  int k = 0;
  std::string schedule = "nested";
  std::vector<int> sizes;
  std::string catalog;
  bool autogen = false;
  std::string out;
};

std::optional<QuadratureRule> catalog_rule(const Catalog& catalog, const WeightFamily& family,
                                           int size) {
  for (const auto& [key, entry] : catalog.entries) {
    if (key.family != family.label() || key.n2 != size) continue;
    if (entry.record.is_pair()) continue;
    if (key.mode == RuleMode::Patterson || (size == 1 && key.mode == RuleMode::Gauss)) {
      return entry.record.finest();
    }
  }
  return std::nullopt;
}

bool contains_nodes(const QuadratureRule& large, const QuadratureRule& small) {
  return std::all_of(small.nodes.begin(), small.nodes.end(), [&large](double x) {
    return std::find(large.nodes.begin(), large.nodes.end(), x) != large.nodes.end();
  });
}

UnivariateLevelFamily nested_from_catalog(const SparseGridOptions& opt, const WeightFamily& family,
                                          std::ostream& err) {
  std::vector<int> schedule = opt.sizes.empty() ? default_nested_schedule(opt.k) : opt.sizes;
  if (static_cast<int>(schedule.size()) < opt.k) {
    throw ExitRequest{kUsage, "--sizes lists fewer than k levels"};
  }
  schedule.resize(static_cast<std::size_t>(opt.k));
  std::vector<int> distinct = schedule;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const std::string dir = !opt.catalog.empty()               ? opt.catalog
                          : std::getenv("NESTQUAD_CATALOG") ? std::getenv("NESTQUAD_CATALOG")
                                                             : "";
  Catalog catalog;
  if (!dir.empty()) {
    catalog = catalog_scan(dir);
    for (const auto& w : catalog.warnings) err << "warning: " << w << "\n";
  }
  const int top = 4 * distinct.back() + 4;
  const RecurrenceTable table = recurrence_coefficients(family, top);
  OptimizerConfig config;

  std::vector<QuadratureRule> chain;
  std::vector<int> missing;
  for (int size : distinct) {
    std::optional<QuadratureRule> rule = catalog_rule(catalog, family, size);
    if (rule && !chain.empty() && !contains_nodes(*rule, chain.back())) rule.reset();
    if (!rule && size == 1) rule = gauss_rule(table, 1);
    if (!rule && opt.autogen) {
      if (chain.empty()) throw ExitRequest{kUsage, "nested schedules must start at size 1"};
      if (size != 2 * static_cast<int>(chain.back().size()) + 1) {
        throw ExitRequest{kUsage, "cannot generate size " + std::to_string(size) +
                                      " by extending size " + std::to_string(chain.back().size())};
      }
      const PattersonResult ext = extend_patterson(chain.back(), table, config);
      rule = ext.rule;
      if (!dir.empty()) {
        OptimizerConfig used = config;
        used.weight_floor = ext.report.weight_floor;
        fs::create_directories(dir);
        save(make_record(ext.rule, RuleMode::Patterson, used, ext.report.total_iterations,
                         static_cast<int>(chain.back().size())),
             fs::path(dir) / (file_stem(family) + "_patterson_n" + std::to_string(size) + ".json"));
      }
    }
    if (!rule) {
      missing.push_back(size);
      continue;
    }
    chain.push_back(*rule);
  }
  if (!missing.empty()) {
    std::string list;
    for (int m : missing) list += (list.empty() ? "" : ", ") + std::to_string(m);
    throw ExitRequest{kMissing, "missing nested levels of size " + list + " for " +
                                    family.label() + " (use --catalog or --autogen)"};
  }
  return nested_levels(chain, schedule);
}

int cmd_sparse_grid(const SparseGridOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.d < 1 || opt.k < 1) throw ExitRequest{kUsage, "--d and --k must be >= 1"};
  const WeightFamily family = opt.family.family();
  UnivariateLevelFamily levels;
  if (opt.schedule == "nested") {
    levels = nested_from_catalog(opt, family, err);
  } else if (opt.schedule == "gauss") {
    std::vector<int> sizes = opt.sizes;
    if (sizes.empty()) {
      for (int i = 1; i <= opt.k; ++i) sizes.push_back(i);
    }
    if (static_cast<int>(sizes.size()) < opt.k) throw ExitRequest{kUsage, "--sizes lists fewer than k levels"};
    const int top = *std::max_element(sizes.begin(), sizes.end());
    const RecurrenceTable table = recurrence_coefficients(family, 2 * top + 2);
    for (int i = 0; i < opt.k; ++i) levels.levels.push_back(gauss_rule(table, sizes[static_cast<std::size_t>(i)]));
  } else {
    throw ExitRequest{kUsage, "--schedule must be nested or gauss"};
  }
  const SparseGrid grid = smolyak_grid(levels, opt.d, opt.k);
  if (!opt.out.empty()) {
    if (fs::path(opt.out).extension() == ".csv") {
      std::ostringstream os;
      write_grid_csv(grid.points, os);
      atomic_write(opt.out, os.str());
    } else {
      save_grid(grid, opt.out);
    }
  }
  out << grid.node_count() << "\n";
  return kOk;
}

// --------------------------------------------------------------- integrate

struct IntegrateOptions {
  std::vector<std::string> grids;
  std::string function;
  std::vector<double> params;
};

// Reference integrals use a Gauss rule of this size per dimension.
constexpr int kReferencePoints = 80;

struct TestFunction {
  Integrand f;
  std::function<double(const WeightFamily&, int)> truth;
};

double param_or(const std::vector<double>& p, std::size_t i, double fallback) {
  if (i < p.size()) return p[i];
  return p.size() == 1 ? p[0] : fallback;
}

TestFunction make_function(const std::string& name, const std::vector<double>& p) {
  if (name == "constant") {
    return {[](std::span<const double>) { return 1.0; },
            [](const WeightFamily&, int) { return 1.0; }};
  }
  if (name == "monomial") {
    auto expo = [p](std::size_t q) { return q < p.size() ? static_cast<int>(p[q]) : 0; };
    return {[expo](std::span<const double> x) {
              double v = 1.0;
              for (std::size_t q = 0; q < x.size(); ++q) v *= std::pow(x[q], expo(q));
              return v;
            },
            [expo](const WeightFamily& family, int d) {
              double v = 1.0;
              for (int q = 0; q < d; ++q) {
                const int e = expo(static_cast<std::size_t>(q));
                const int n = e / 2 + 1;
                const QuadratureRule g = gauss_rule(recurrence_coefficients(family, 2 * n), n);
                double m = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) m += g.weights[i] * std::pow(g.nodes[i], e);
                v *= m;
              }
              return v;
            }};
  }
  if (name == "product-exp") {
    auto c = [p](std::size_t q) { return param_or(p, q, 1.0); };
    return {[c](std::span<const double> x) {
              double s = 0.0;
              for (std::size_t q = 0; q < x.size(); ++q) s += c(q) * x[q];
              return std::exp(s);
            },
            [c](const WeightFamily& family, int d) {
              const QuadratureRule g =
                  gauss_rule(recurrence_coefficients(family, 2 * kReferencePoints), kReferencePoints);
              double v = 1.0;
              for (int q = 0; q < d; ++q) {
                double m = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                  m += g.weights[i] * std::exp(c(static_cast<std::size_t>(q)) * g.nodes[i]);
                }
                v *= m;
              }
              return v;
            }};
  }
  if (name == "oscillatory") {
    const double shift = p.empty() ? 0.0 : p[0];
    const std::vector<double> rest = p.size() > 1 ? std::vector<double>(p.begin() + 1, p.end())
                                                  : std::vector<double>{};
    auto c = [rest](std::size_t q) { return param_or(rest, q, 1.0); };
    return {[shift, c](std::span<const double> x) {
              double s = 2.0 * std::numbers::pi * shift;
              for (std::size_t q = 0; q < x.size(); ++q) s += c(q) * x[q];
              return std::cos(s);
            },
            [shift, c](const WeightFamily& family, int d) {
              const QuadratureRule g =
                  gauss_rule(recurrence_coefficients(family, 2 * kReferencePoints), kReferencePoints);
              std::complex<double> v = std::polar(1.0, 2.0 * std::numbers::pi * shift);
              for (int q = 0; q < d; ++q) {
                std::complex<double> m = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                  m += g.weights[i] * std::polar(1.0, c(static_cast<std::size_t>(q)) * g.nodes[i]);
                }
                v *= m;
              }
              return v.real();
            }};
  }
  throw ExitRequest{kUsage, "unknown function '" + name +
                                "' (constant, monomial, product-exp, oscillatory)"};
}

double relative_error(double estimate, double truth) {
  return truth != 0.0 ? std::abs((estimate - truth) / truth) : std::abs(estimate);
}

PointSet rule_points(const QuadratureRule& rule) {
  PointSet p;
  p.dim = 1;
  p.coords = rule.nodes;
  p.weights = rule.weights;
  return p;
}

int cmd_integrate(const IntegrateOptions& opt, std::ostream& out, std::ostream&) {
  if (opt.grids.empty()) throw ExitRequest{kUsage, "--grid is required"};
  const TestFunction fn = make_function(opt.function, opt.params);
  out << std::left << std::setw(40) << "grid" << " " << std::setw(10) << "nodes" << std::setw(24)
      << "estimate" << std::setw(14) << "rel_error" << "\n";
  for (const auto& path : opt.grids) {
    std::ifstream probe(path);
    if (!probe) throw ExitRequest{kIo, "cannot open " + path};
    nlohmann::json head;
    try {
      head = nlohmann::json::parse(probe);
    } catch (const std::exception& e) {
      throw ExitRequest{kIo, path + ": " + e.what()};
    }
    if (head.contains("schema_version")) {
      const RuleRecord rec = load_input(path, true);
      const WeightFamily& family = rec.family();
      const double truth = fn.truth(family, 1);
      const double fine = integrate(rule_points(rec.finest()), fn.f);
      out << std::setw(40) << path << " " << std::setw(10) << rec.finest().size() << std::setw(24)
          << std::setprecision(16) << fine << std::setw(14) << fmt(relative_error(fine, truth))
          << "\n";
      if (const auto* pair = std::get_if<NestedRulePair>(&rec.payload)) {
        const double coarse = integrate(rule_points(pair->coarse), fn.f);
        out << "  coarse " << std::setprecision(16) << coarse << " fine " << fine
            << " e_I " << fmt(relative_error(coarse, fine)) << "\n";
      }
      out << "  truth " << std::setprecision(16) << truth << "\n";
    } else {
      LoadedGrid grid;
      try {
        grid = load_grid(path);
      } catch (const Error& e) {
        throw ExitRequest{kIo, e.what()};
      }
      const double truth = fn.truth(grid.family, grid.dim);
      const double est = integrate(grid.points, fn.f);
      out << std::setw(40) << path << " " << std::setw(10) << grid.points.size() << std::setw(24)
          << std::setprecision(16) << est << std::setw(14) << fmt(relative_error(est, truth))
          << "\n";
      out << "  truth " << std::setprecision(16) << truth << "\n";
    }
  }
  return kOk;
}

// ------------------------------------------------------------------ export

struct ExportOptions {
  std::string in;
  std::string format = "csv";
  std::string which = "fine";
  std::string out;
};

int cmd_export(const ExportOptions& opt, std::ostream& out, std::ostream& err) {
  const RuleRecord rec = load_input(opt.in, true);
  const QuadratureRule* rule = &rec.finest();
  if (opt.which == "coarse") {
    const auto* pair = std::get_if<NestedRulePair>(&rec.payload);
    if (!pair) throw ExitRequest{kUsage, "--which coarse needs a pair record"};
    rule = &pair->coarse;
  } else if (opt.which != "fine") {
    throw ExitRequest{kUsage, "--which must be fine or coarse"};
  }
  std::ostringstream os;
  if (opt.format == "csv") {
    write_rule_csv(*rule, os);
  } else if (opt.format == "circle") {
    const Interval& dom = rule->family.domain();
    if (!(dom.lo == -1.0 && dom.hi == 1.0)) {
      err << "unsupported-family: circle export needs a weight on [-1, 1]\n";
      return kUsage;
    }
    const double n = static_cast<double>(rule->size());
    os << "node,scaled_weight,semicircle\n" << std::setprecision(17);
    for (std::size_t q = 0; q < rule->size(); ++q) {
      const double x = rule->nodes[q];
      const double dens = rule->family.density(x);
      const double scaled = std::isfinite(dens) && dens > 0.0
                                ? n * rule->weights[q] / (std::numbers::pi * dens)
                                : 0.0;
      os << x << "," << scaled << "," << std::sqrt(std::max(0.0, 1.0 - x * x)) << "\n";
    }
  } else if (opt.format == "json") {
    os << to_json(rec);
  } else {
    throw ExitRequest{kUsage, "--format must be csv, circle or json"};
  }
  if (opt.out.empty()) {
    out << os.str();
  } else {
    atomic_write(opt.out, os.str());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nested quadrature rules and sparse grids"};
  app.name("nestquad");
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Optimize a nested Kronrod-style pair");
  gen.family.attach(g);
  g->add_option("--n1", gen.n1, "Coarse sizes, comma-separated")->delimiter(',')->required();
  g->add_option("--eps", gen.eps, "Residual tolerance");
  g->add_option("--alpha2-init", gen.alpha2_init, "Initial fine exactness degree");
  g->add_flag("--allow-negative-weights", gen.allow_negative);
  g->add_option("--out", gen.out, "Record file, or directory for several n1")->required();
  g->add_option("--log", gen.log, "Per-iteration CSV log");
  g->add_option("--jobs", gen.jobs, "Worker threads for several n1");

  ExtendOptions ext;
  auto* e = app.add_subcommand("extend", "Patterson-style extension of a stored rule");
  e->add_option("--in", ext.in)->required();
  e->add_option("--steps", ext.steps);
  e->add_flag("--prune", ext.prune, "Drop negligible weights from the last level");
  e->add_option("--eps", ext.eps);
  e->add_option("--out", ext.out, "Directory for the level records")->required();

  GaussOptions gs;
  auto* ga = app.add_subcommand("gauss", "Gauss rule of a family");
  gs.family.attach(ga);
  ga->add_option("--n", gs.n)->required();
  ga->add_option("--out", gs.out, "Record (.json) or CSV (.csv) path");

  VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "Re-check the moments of a stored rule");
  v->add_option("--in", ver.in)->required();
  v->add_option("--alpha", ver.alpha);
  v->add_flag("--circle-theorem", ver.circle);

  SparseGridOptions sg;
  auto* s = app.add_subcommand("sparse-grid", "Smolyak grid from univariate levels");
  sg.family.attach(s);
  s->add_option("--d", sg.d)->required();
  s->add_option("--k", sg.k)->required();
  s->add_option("--schedule", sg.schedule, "nested or gauss");
  s->add_option("--sizes", sg.sizes, "Rule size per level")->delimiter(',');
  s->add_option("--catalog", sg.catalog, "Rule catalog directory (default $NESTQUAD_CATALOG)");
  s->add_flag("--autogen", sg.autogen, "Generate missing nested levels");
  s->add_option("--out", sg.out, "Grid file (.csv or .json)");

  IntegrateOptions in;
  auto* i = app.add_subcommand("integrate", "Integrate a test function on grids or rules");
  i->add_option("--grid", in.grids, "Grid or rule file; repeat to compare")->required();
  i->add_option("--function", in.function)->required();
  i->add_option("--params", in.params)->delimiter(',');

  ExportOptions ex;
  auto* x = app.add_subcommand("export", "Write a stored rule as CSV or JSON");
  x->add_option("--in", ex.in)->required();
  x->add_option("--format", ex.format, "csv, circle or json");
  x->add_option("--which", ex.which, "fine or coarse rule of a pair");
  x->add_option("--out", ex.out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out, err);
    if (e->parsed()) return cmd_extend(ext, out, err);
    if (ga->parsed()) return cmd_gauss(gs, out, err);
    if (v->parsed()) return cmd_verify(ver, out, err);
    if (s->parsed()) return cmd_sparse_grid(sg, out, err);
    if (i->parsed()) return cmd_integrate(in, out, err);
    if (x->parsed()) return cmd_export(ex, out, err);
  } catch (const ExitRequest& req) {
    err << req.message << "\n";
    return req.code;
  } catch (const Error& er) {
    err << to_string(er.kind()) << ": " << er.what() << "\n";
    return exit_code_for(er.kind());
  } catch (const std::exception& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace nestquad::cli
