#pragma once

// Weight families, three-term recurrence coefficients and evaluation of the
// orthonormal polynomials they generate.
//
// Every built-in family is stored probability-normalized: the weight
// integrates to one, so b_0 = 1 and p_0 = 1.

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nestquad {

enum class FamilyKind {
  Legendre,
  ChebyshevFirstKind,
  Jacobi,
  GeneralizedHermite,
  GeneralizedLaguerre,
  Custom,
};

/// Support of a weight function. Infinite endpoints mark unbounded
/// directions (real line or half line).
struct Interval {
  double lo;
  double hi;

  bool lower_bounded() const;
  bool upper_bounded() const;
  bool bounded() const { return lower_bounded() && upper_bounded(); }
  bool contains(double x) const { return x >= lo && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A weight function identified by kind and parameters.
///
/// Jacobi weights are (1-x)^alpha (1+x)^beta on [-1, 1]; generalized Hermite
/// weights are |x|^rho e^{-x^2} on the real line; generalized Laguerre
/// weights are x^rho e^{-x} on [0, inf). Custom families carry their own
/// recurrence coefficients and support.
class WeightFamily {
 public:
  static WeightFamily legendre();
  static WeightFamily chebyshev();
  static WeightFamily jacobi(double alpha, double beta);
  static WeightFamily hermite(double rho = 0.0);
  static WeightFamily laguerre(double rho = 0.0);
  static WeightFamily custom(std::vector<double> a, std::vector<double> b,
                             Interval domain);

  FamilyKind kind() const { return kind_; }
  const Interval& domain() const { return domain_; }

  /// Named parameters in a fixed order, e.g. {{"alpha", 0}, {"beta", 0.3}}.
  const std::vector<std::pair<std::string, double>>& params() const {
    return params_;
  }
  double param(const std::string& name) const;

  /// True when the weight is even about the origin (a_n = 0 for all n).
  bool symmetric() const;

  /// Probability density of the weight. Throws UnsupportedFamily for Custom.
  double density(double x) const;

  /// Lowercase kind name used in files and on the command line.
  std::string kind_name() const;
  /// Human-readable identifier including parameters, e.g. "jacobi(0,0.3)".
  std::string label() const;

  const std::vector<double>& custom_a() const { return custom_a_; }
  const std::vector<double>& custom_b() const { return custom_b_; }

  friend bool operator==(const WeightFamily&, const WeightFamily&) = default;

 private:
  WeightFamily(FamilyKind kind, Interval domain,
               std::vector<std::pair<std::string, double>> params);

  FamilyKind kind_;
  Interval domain_;
  std::vector<std::pair<std::string, double>> params_;
  std::vector<double> custom_a_;
  std::vector<double> custom_b_;
};

/// Built-in family from positional parameters (jacobi: alpha, beta;
/// hermite and laguerre: rho). Missing parameters default to 0.
WeightFamily make_family(FamilyKind kind, std::span<const double> params);

FamilyKind parse_family_kind(const std::string& name);
std::string family_kind_name(FamilyKind kind);

/// Recurrence x p_n = sqrt(b_n) p_{n-1} + a_n p_n + sqrt(b_{n+1}) p_{n+1}
/// with p_{-1} = 0 and p_0 = 1/sqrt(b_0). Entries are valid for n = 0..N.
struct RecurrenceTable {
  WeightFamily family;
  std::vector<double> a;
  std::vector<double> b;

  int max_degree() const { return static_cast<int>(a.size()) - 1; }
};

RecurrenceTable recurrence_coefficients(const WeightFamily& family, int max_degree);

/// values(j, i) = p_j(x_i); derivatives has the same shape when requested.
struct PolynomialEvaluation {
  Eigen::MatrixXd values;
  std::optional<Eigen::MatrixXd> derivatives;
};

PolynomialEvaluation eval_orthonormal(const RecurrenceTable& table, int degree,
                                      std::span<const double> nodes,
                                      bool with_derivatives);

/// (degree+1) x n matrix whose row j holds p_j at each node.
Eigen::MatrixXd vandermonde(const RecurrenceTable& table, int degree,
                            std::span<const double> nodes);

}  // namespace nestquad
