#include "nestquad/orthopoly.hpp"

#include "nestquad/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nestquad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_param(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ParameterDomain, what);
}

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

bool Interval::lower_bounded() const { return std::isfinite(lo); }
bool Interval::upper_bounded() const { return std::isfinite(hi); }

WeightFamily::WeightFamily(FamilyKind kind, Interval domain,
                           std::vector<std::pair<std::string, double>> params)
    : kind_(kind), domain_(domain), params_(std::move(params)) {}

WeightFamily WeightFamily::legendre() {
  return WeightFamily(FamilyKind::Legendre, {-1.0, 1.0}, {});
}

WeightFamily WeightFamily::chebyshev() {
  return WeightFamily(FamilyKind::ChebyshevFirstKind, {-1.0, 1.0}, {});
}

WeightFamily WeightFamily::jacobi(double alpha, double beta) {
  require_param(std::isfinite(alpha) && alpha > -1.0,
                "jacobi: alpha must be > -1, got " + format_param(alpha));
  require_param(std::isfinite(beta) && beta > -1.0,
                "jacobi: beta must be > -1, got " + format_param(beta));
  return WeightFamily(FamilyKind::Jacobi, {-1.0, 1.0},
                      {{"alpha", alpha}, {"beta", beta}});
}

WeightFamily WeightFamily::hermite(double rho) {
  require_param(std::isfinite(rho) && rho > -1.0,
                "hermite: rho must be > -1, got " + format_param(rho));
  return WeightFamily(FamilyKind::GeneralizedHermite, {-kInf, kInf},
                      {{"rho", rho}});
}

WeightFamily WeightFamily::laguerre(double rho) {
  require_param(std::isfinite(rho) && rho > -1.0,
                "laguerre: rho must be > -1, got " + format_param(rho));
  return WeightFamily(FamilyKind::GeneralizedLaguerre, {0.0, kInf},
                      {{"rho", rho}});
}

WeightFamily WeightFamily::custom(std::vector<double> a, std::vector<double> b,
                                  Interval domain) {
  require_param(!a.empty() && a.size() == b.size(),
                "custom: a and b must be non-empty and of equal length");
  require_param(domain.lo < domain.hi, "custom: domain requires lo < hi");
  for (std::size_t n = 0; n < a.size(); ++n) {
    require_param(std::isfinite(a[n]), "custom: a[" + std::to_string(n) + "] is not finite");
    require_param(std::isfinite(b[n]) && b[n] > 0.0,
                  "custom: b[" + std::to_string(n) + "] must be positive and finite");
  }
  WeightFamily family(FamilyKind::Custom, domain, {});
  family.custom_a_ = std::move(a);
  family.custom_b_ = std::move(b);
  return family;
}

double WeightFamily::param(const std::string& name) const {
  for (const auto& [key, value] : params_) {
    if (key == name) return value;
  }
  throw Error(ErrorKind::ParameterDomain,
              label() + " has no parameter named '" + name + "'");
}

bool WeightFamily::symmetric() const {
  switch (kind_) {
    case FamilyKind::Legendre:
    case FamilyKind::ChebyshevFirstKind:
    case FamilyKind::GeneralizedHermite:
      return true;
    case FamilyKind::Jacobi:
      return param("alpha") == param("beta");
    case FamilyKind::GeneralizedLaguerre:
      return false;
    case FamilyKind::Custom:
      for (double v : custom_a_) {
        if (v != 0.0) return false;
      }
      return domain_.lo == -domain_.hi;
  }
  return false;
}

double WeightFamily::density(double x) const {
  if (!domain_.contains(x)) return 0.0;
  switch (kind_) {
    case FamilyKind::Legendre:
      return 0.5;
    case FamilyKind::ChebyshevFirstKind:
      return 1.0 / (std::numbers::pi * std::sqrt((1.0 - x) * (1.0 + x)));
    case FamilyKind::Jacobi: {
      const double al = param("alpha");
      const double be = param("beta");
      const double log_norm = (al + be + 1.0) * std::log(2.0) + std::lgamma(al + 1.0) +
                              std::lgamma(be + 1.0) - std::lgamma(al + be + 2.0);
      return std::pow(1.0 - x, al) * std::pow(1.0 + x, be) * std::exp(-log_norm);
    }
    case FamilyKind::GeneralizedHermite: {
      const double rho = param("rho");
      return std::pow(std::abs(x), rho) * std::exp(-x * x - std::lgamma(0.5 * (rho + 1.0)));
    }
    case FamilyKind::GeneralizedLaguerre: {
      const double rho = param("rho");
      return std::pow(x, rho) * std::exp(-x - std::lgamma(rho + 1.0));
    }
    case FamilyKind::Custom:
      break;
  }
  throw Error(ErrorKind::UnsupportedFamily, "custom families carry no density");
}

std::string WeightFamily::kind_name() const { return family_kind_name(kind_); }

std::string WeightFamily::label() const {
  std::string out = kind_name();
  if (!params_.empty()) {
    out += "(";
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (i) out += ",";
      out += format_param(params_[i].second);
    }
    out += ")";
  }
  return out;
}

std::string family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Legendre: return "legendre";
    case FamilyKind::ChebyshevFirstKind: return "chebyshev";
    case FamilyKind::Jacobi: return "jacobi";
    case FamilyKind::GeneralizedHermite: return "hermite";
    case FamilyKind::GeneralizedLaguerre: return "laguerre";
    case FamilyKind::Custom: return "custom";
  }
  return "unknown";
}

FamilyKind parse_family_kind(const std::string& name) {
  if (name == "legendre") return FamilyKind::Legendre;
  if (name == "chebyshev") return FamilyKind::ChebyshevFirstKind;
  if (name == "jacobi") return FamilyKind::Jacobi;
  if (name == "hermite") return FamilyKind::GeneralizedHermite;
  if (name == "laguerre") return FamilyKind::GeneralizedLaguerre;
  if (name == "custom") return FamilyKind::Custom;
  throw Error(ErrorKind::ParameterDomain, "unknown family kind '" + name + "'");
}

WeightFamily make_family(FamilyKind kind, std::span<const double> params) {
  auto at = [&params](std::size_t i) { return i < params.size() ? params[i] : 0.0; };
  std::size_t expected = 0;
  switch (kind) {
    case FamilyKind::Legendre: expected = 0; break;
    case FamilyKind::ChebyshevFirstKind: expected = 0; break;
    case FamilyKind::Jacobi: expected = 2; break;
    case FamilyKind::GeneralizedHermite: expected = 1; break;
    case FamilyKind::GeneralizedLaguerre: expected = 1; break;
    case FamilyKind::Custom:
      throw Error(ErrorKind::ParameterDomain,
                  "custom families need explicit recurrence coefficients");
  }
  if (params.size() > expected) {
    throw Error(ErrorKind::ParameterDomain,
                family_kind_name(kind) + " takes " + std::to_string(expected) +
                    " parameter(s), got " + std::to_string(params.size()));
  }
  switch (kind) {
    case FamilyKind::Jacobi: return WeightFamily::jacobi(at(0), at(1));
    case FamilyKind::GeneralizedHermite: return WeightFamily::hermite(at(0));
    case FamilyKind::GeneralizedLaguerre: return WeightFamily::laguerre(at(0));
    case FamilyKind::ChebyshevFirstKind: return WeightFamily::chebyshev();
    default: return WeightFamily::legendre();
  }
}

RecurrenceTable recurrence_coefficients(const WeightFamily& family, int max_degree) {
  require_param(max_degree >= 1, "recurrence table needs max degree >= 1");
  const auto count = static_cast<std::size_t>(max_degree) + 1;
  RecurrenceTable table{family, std::vector<double>(count, 0.0),
                        std::vector<double>(count, 0.0)};
  auto& a = table.a;
  auto& b = table.b;
  b[0] = 1.0;

  switch (family.kind()) {
    case FamilyKind::Legendre:
      for (std::size_t n = 1; n < count; ++n) {
        const double nn = static_cast<double>(n * n);
        b[n] = nn / (4.0 * nn - 1.0);
      }
      break;
    case FamilyKind::ChebyshevFirstKind:
      b[1] = 0.5;
      for (std::size_t n = 2; n < count; ++n) b[n] = 0.25;
      break;
    case FamilyKind::Jacobi: {
      const double al = family.param("alpha");
      const double be = family.param("beta");
      a[0] = (be - al) / (al + be + 2.0);
      for (std::size_t n = 1; n < count; ++n) {
        const double dn = static_cast<double>(n);
        const double s = 2.0 * dn + al + be;
        a[n] = (be * be - al * al) / (s * (s + 2.0));
        if (n == 1) {
          b[1] = 4.0 * (1.0 + al) * (1.0 + be) /
                 ((2.0 + al + be) * (2.0 + al + be) * (3.0 + al + be));
        } else {
          b[n] = 4.0 * dn * (dn + al) * (dn + be) * (dn + al + be) /
                 (s * s * (s + 1.0) * (s - 1.0));
        }
      }
      break;
    }
    case FamilyKind::GeneralizedHermite: {
      const double rho = family.param("rho");
      for (std::size_t n = 1; n < count; ++n) {
        const double dn = static_cast<double>(n);
        b[n] = 0.5 * (n % 2 == 1 ? dn + rho : dn);
      }
      break;
    }
    case FamilyKind::GeneralizedLaguerre: {
      const double rho = family.param("rho");
      for (std::size_t n = 0; n < count; ++n) {
        const double dn = static_cast<double>(n);
        a[n] = 2.0 * dn + rho + 1.0;
        if (n > 0) b[n] = dn * (dn + rho);
      }
      break;
    }
    case FamilyKind::Custom: {
      const auto& ca = family.custom_a();
      const auto& cb = family.custom_b();
      if (ca.size() < count) {
        throw Error(ErrorKind::Capacity,
                    "custom family supplies coefficients up to degree " +
                        std::to_string(ca.size() - 1) + ", requested " +
                        std::to_string(max_degree));
      }
      std::copy_n(ca.begin(), count, a.begin());
      std::copy_n(cb.begin(), count, b.begin());
      break;
    }
  }
  return table;
}

PolynomialEvaluation eval_orthonormal(const RecurrenceTable& table, int degree,
                                      std::span<const double> nodes,
                                      bool with_derivatives) {
  if (degree < 0 || degree > table.max_degree()) {
    throw Error(ErrorKind::Capacity,
                "polynomial degree " + std::to_string(degree) +
                    " exceeds recurrence table capacity " +
                    std::to_string(table.max_degree()));
  }
  const auto rows = static_cast<Eigen::Index>(degree) + 1;
  const auto cols = static_cast<Eigen::Index>(nodes.size());
  PolynomialEvaluation out;
  out.values.resize(rows, cols);
  Eigen::MatrixXd deriv;
  if (with_derivatives) deriv.setZero(rows, cols);

  const double p0 = 1.0 / std::sqrt(table.b[0]);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double x = nodes[static_cast<std::size_t>(i)];
    double prev = 0.0, cur = p0;
    double dprev = 0.0, dcur = 0.0;
    out.values(0, i) = cur;
    for (Eigen::Index m = 0; m + 1 < rows; ++m) {
      const auto um = static_cast<std::size_t>(m);
      const double sb_m = m > 0 ? std::sqrt(table.b[um]) : 0.0;
      const double sb_next = std::sqrt(table.b[um + 1]);
      const double shifted = x - table.a[um];
      const double next = (shifted * cur - sb_m * prev) / sb_next;
      if (with_derivatives) {
        const double dnext = (shifted * dcur - sb_m * dprev + cur) / sb_next;
        dprev = dcur;
        dcur = dnext;
        deriv(m + 1, i) = dnext;
      }
      prev = cur;
      cur = next;
      out.values(m + 1, i) = next;
    }
  }
  if (with_derivatives) out.derivatives = std::move(deriv);
  return out;
}

Eigen::MatrixXd vandermonde(const RecurrenceTable& table, int degree,
                            std::span<const double> nodes) {
  return eval_orthonormal(table, degree, nodes, false).values;
}

}  // namespace nestquad
