#pragma once

#include <functional>
#include <limits>
#include <string>

namespace seqglr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class FamilyKind { SubGaussian, SubExponential, Bernoulli, Poisson, Custom };

// Structural class of the CGF bound. Additive families have
// psi_mu(lambda) = lambda * mu + psi(lambda); EF-like ones are built from a
// log-partition function B.
enum class FamilyClass { Additive, EfLikeSubB, Custom };

enum class Side { Upper, Lower };

// Everything a user-defined family has to provide. No derivative is
// approximated numerically, so all function members must be set.
struct CustomFunctions {
  std::function<double(double, double)> psi;            // (lambda, mu)
  std::function<double(double, double)> psi_grad;       // (lambda, mu)
  std::function<double(double, double)> psi_star;       // (z, mu)
  std::function<double(double, double)> psi_star_grad;  // (z, mu)
  std::function<double(double)> variance_bound;         // mu
  double mean_lo = -kInf;
  double mean_hi = kInf;
  double lambda_lo = -kInf;
  double lambda_hi = kInf;
};

// Immutable descriptor of a sub-psi family. Built-in families dispatch on a
// tag so the hot paths stay free of indirect calls.
class PsiFamily {
 public:
  static PsiFamily sub_gaussian(double sigma);
  // psi(lambda) = -log(1 - b lambda) - b lambda on lambda < 1/b, the CGF of
  // b (E - 1) with E ~ Exp(1).
  static PsiFamily sub_exponential(double b);
  static PsiFamily bernoulli();
  static PsiFamily poisson();
  static PsiFamily custom(CustomFunctions fns, std::string name = "custom");

  FamilyKind kind() const { return kind_; }
  FamilyClass family_class() const;
  const std::string& name() const { return name_; }
  // sigma for sub-Gaussian, b for sub-exponential, 0 otherwise.
  double scale() const { return scale_; }

  double mean_lo() const { return mean_lo_; }
  double mean_hi() const { return mean_hi_; }
  double lambda_lo() const { return lambda_lo_; }
  double lambda_hi() const { return lambda_hi_; }
  bool in_mean_domain(double mu) const { return mu > mean_lo_ && mu < mean_hi_; }
  bool in_mean_closure(double z) const { return z >= mean_lo_ && z <= mean_hi_; }
  bool in_support(double x) const;

  double psi(double lambda, double mu) const;
  double psi_grad(double lambda, double mu) const;
  double psi_star(double z, double mu) const;
  double psi_star_grad(double z, double mu) const;
  double variance_bound(double mu) const;

  // Limits of z -> D(z, mu0) at the upper and lower ends of the mean domain.
  double sup_divergence_upper(double mu0) const;
  double sup_divergence_lower(double mu0) const;

  bool is_additive() const { return family_class() == FamilyClass::Additive; }
  // True when the one-sided confidence sets are intervals at every time, so
  // bisection over mu0 is safe (additive families and EF-like families with
  // convex grad B).
  bool intervals_everywhere() const;

 private:
  PsiFamily() = default;
  FamilyKind kind_ = FamilyKind::SubGaussian;
  std::string name_;
  double scale_ = 0.0;
  double mean_lo_ = -kInf;
  double mean_hi_ = kInf;
  double lambda_lo_ = -kInf;
  double lambda_hi_ = kInf;
  CustomFunctions custom_;
};

// D(z, mu0) = psi*_{mu0}(z), with analytic limits at the closure of M.
double bregman(const PsiFamily& fam, double z, double mu0);
// d/dz D(z, mu0).
double bregman_grad(const PsiFamily& fam, double z, double mu0);
double inv_bregman(const PsiFamily& fam, double mu0, double d, Side side);

// n [lambda1 xbar - psi_{mu0}(lambda1)], lambda1 = grad psi*_{mu0}(mu1).
double log_lr_like(const PsiFamily& fam, double n, double xbar, double mu1, double mu0);
// n [D(mu1, mu0) + D'(mu1, mu0) (xbar - mu1)].
double log_lr_like_tangent(const PsiFamily& fam, double n, double xbar, double mu1,
                           double mu0);
// n [D(xbar, mu0) - D_{psi*_{mu0}}(xbar, mu1)].
double log_lr_like_difference(const PsiFamily& fam, double n, double xbar, double mu1,
                              double mu0);
double log_glr_like(const PsiFamily& fam, double n, double xbar, double mu1, double mu0);

// Common value of D(z, mu0) = D_{mu}(z, mu) at the balance point between
// the two means. Symmetric in its arguments.
double dstar(const PsiFamily& fam, double mu, double mu0);
double dstar_point(const PsiFamily& fam, double mu, double mu0);

}  // namespace seqglr
