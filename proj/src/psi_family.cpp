#include "seqglr/psi_family.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "seqglr/errors.hpp"
#include "seqglr/root_find.hpp"

namespace seqglr {

namespace {

// x log(x / y) with the 0 log 0 = 0 convention.
double xlogxy(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_mean(const PsiFamily& fam, double mu, const char* what) {
  if (!(fam.in_mean_domain(mu))) {
    throw DomainError(std::string(what) + " = " + fmt_num(mu) + " is outside the mean domain of " +
                      fam.name());
  }
}

void require_closure(const PsiFamily& fam, double z, const char* what) {
  if (std::isnan(z) || !fam.in_mean_closure(z)) {
    throw DomainError(std::string(what) + " = " + fmt_num(z) +
                      " is outside the closure of the mean domain of " + fam.name());
  }
}

// Numeric limit of D(z, mu0) as z runs to +inf (dir = 1) or -inf (dir = -1).
double numeric_tail_limit(const PsiFamily& fam, double mu0, int dir) {
  double prev = fam.psi_star(mu0, mu0);
  double step = std::max(1.0, std::abs(mu0));
  for (int i = 0; i < 1100; ++i) {
    const double z = mu0 + dir * step;
    const double v = fam.psi_star(z, mu0);
    if (!std::isfinite(v) || v > 1e300) return kInf;
    if (i > 4 && std::abs(v - prev) <= 1e-13 * std::max(1.0, std::abs(v))) return v;
    prev = v;
    step *= 2.0;
    if (!std::isfinite(step)) break;
  }
  return kInf;
}

}  // namespace

PsiFamily PsiFamily::sub_gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
  PsiFamily f;
  f.kind_ = FamilyKind::SubGaussian;
  f.name_ = "sub-gaussian";
  f.scale_ = sigma;
  return f;
}

PsiFamily PsiFamily::sub_exponential(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("scale b must be positive");
  PsiFamily f;
  f.kind_ = FamilyKind::SubExponential;
  f.name_ = "sub-exponential";
  f.scale_ = b;
  f.lambda_hi_ = 1.0 / b;
  return f;
}

PsiFamily PsiFamily::bernoulli() {
  PsiFamily f;
  f.kind_ = FamilyKind::Bernoulli;
  f.name_ = "bernoulli";
  f.mean_lo_ = 0.0;
  f.mean_hi_ = 1.0;
  return f;
}

PsiFamily PsiFamily::poisson() {
  PsiFamily f;
  f.kind_ = FamilyKind::Poisson;
  f.name_ = "poisson";
  f.mean_lo_ = 0.0;
  return f;
}

PsiFamily PsiFamily::custom(CustomFunctions fns, std::string name) {
  if (!fns.psi || !fns.psi_grad || !fns.psi_star || !fns.psi_star_grad || !fns.variance_bound) {
    throw DomainError("custom family must provide psi, psi_grad, psi_star, psi_star_grad and "
                      "variance_bound");
  }
  if (!(fns.mean_lo < fns.mean_hi) || !(fns.lambda_lo < 0.0 && 0.0 < fns.lambda_hi)) {
    throw DomainError("custom family domains are malformed");
  }
  PsiFamily f;
  f.kind_ = FamilyKind::Custom;
  f.name_ = std::move(name);
  f.mean_lo_ = fns.mean_lo;
  f.mean_hi_ = fns.mean_hi;
  f.lambda_lo_ = fns.lambda_lo;
  f.lambda_hi_ = fns.lambda_hi;
  f.custom_ = std::move(fns);
  return f;
}

FamilyClass PsiFamily::family_class() const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
    case FamilyKind::SubExponential:
      return FamilyClass::Additive;
    case FamilyKind::Bernoulli:
    case FamilyKind::Poisson:
      return FamilyClass::EfLikeSubB;
    case FamilyKind::Custom:
      break;
  }
  return FamilyClass::Custom;
}

bool PsiFamily::intervals_everywhere() const {
  return kind_ == FamilyKind::SubGaussian || kind_ == FamilyKind::SubExponential ||
         kind_ == FamilyKind::Poisson;
}

bool PsiFamily::in_support(double x) const {
  if (std::isnan(x)) return false;
  switch (kind_) {
    case FamilyKind::Bernoulli:
      return x >= 0.0 && x <= 1.0;
    case FamilyKind::Poisson:
      return x >= 0.0 && std::isfinite(x);
    case FamilyKind::Custom:
      return in_mean_closure(x);
    default:
      return std::isfinite(x);
  }
}

double PsiFamily::psi(double lambda, double mu) const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
      return lambda * mu + 0.5 * scale_ * scale_ * lambda * lambda;
    case FamilyKind::SubExponential: {
      const double bl = scale_ * lambda;
      if (bl >= 1.0) return kInf;
      return lambda * mu - std::log1p(-bl) - bl;
    }
    case FamilyKind::Bernoulli:
      if (lambda > 0.0) return lambda + std::log(mu + (1.0 - mu) * std::exp(-lambda));
      return std::log1p(mu * std::expm1(lambda));
    case FamilyKind::Poisson:
      return mu * std::expm1(lambda);
    case FamilyKind::Custom:
      return custom_.psi(lambda, mu);
  }
  return kInf;
}

double PsiFamily::psi_grad(double lambda, double mu) const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
      return mu + scale_ * scale_ * lambda;
    case FamilyKind::SubExponential: {
      const double bl = scale_ * lambda;
      if (bl >= 1.0) return kInf;
      return mu + scale_ * bl / (1.0 - bl);
    }
    case FamilyKind::Bernoulli:
      return 1.0 / (1.0 + (1.0 - mu) / mu * std::exp(-lambda));
    case FamilyKind::Poisson:
      return mu * std::exp(lambda);
    case FamilyKind::Custom:
      return custom_.psi_grad(lambda, mu);
  }
  return kInf;
}

double PsiFamily::psi_star(double z, double mu) const {
  switch (kind_) {
    case FamilyKind::SubGaussian: {
      const double u = (z - mu) / scale_;
      return 0.5 * u * u;
    }
    case FamilyKind::SubExponential: {
      const double u = (z - mu) / scale_;
      if (u <= -1.0) return kInf;
      return std::max(0.0, u - std::log1p(u));
    }
    case FamilyKind::Bernoulli:
      if (z < 0.0 || z > 1.0) return kInf;
      return std::max(0.0, xlogxy(z, mu) + xlogxy(1.0 - z, 1.0 - mu));
    case FamilyKind::Poisson:
      if (z < 0.0) return kInf;
      if (z == 0.0) return mu;
      return std::max(0.0, z * std::log(z / mu) - z + mu);
    case FamilyKind::Custom:
      return custom_.psi_star(z, mu);
  }
  return kInf;
}

double PsiFamily::psi_star_grad(double z, double mu) const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
      return (z - mu) / (scale_ * scale_);
    case FamilyKind::SubExponential: {
      const double u = z - mu;
      if (u <= -scale_) return -kInf;
      return u / (scale_ * (scale_ + u));
    }
    case FamilyKind::Bernoulli:
      if (z <= 0.0) return -kInf;
      if (z >= 1.0) return kInf;
      return std::log(z / (1.0 - z)) - std::log(mu / (1.0 - mu));
    case FamilyKind::Poisson:
      if (z <= 0.0) return -kInf;
      return std::log(z / mu);
    case FamilyKind::Custom:
      return custom_.psi_star_grad(z, mu);
  }
  return kInf;
}

double PsiFamily::variance_bound(double mu) const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
      return scale_ * scale_;
    case FamilyKind::SubExponential:
      return scale_ * scale_;
    case FamilyKind::Bernoulli:
      return mu * (1.0 - mu);
    case FamilyKind::Poisson:
      return mu;
    case FamilyKind::Custom:
      return custom_.variance_bound(mu);
  }
  return kInf;
}

double PsiFamily::sup_divergence_upper(double mu0) const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
    case FamilyKind::SubExponential:
    case FamilyKind::Poisson:
      return kInf;
    case FamilyKind::Bernoulli:
      return -std::log(mu0);
    case FamilyKind::Custom:
      if (std::isfinite(mean_hi_)) return psi_star(mean_hi_, mu0);
      return numeric_tail_limit(*this, mu0, 1);
  }
  return kInf;
}

double PsiFamily::sup_divergence_lower(double mu0) const {
  switch (kind_) {
    case FamilyKind::SubGaussian:
    case FamilyKind::SubExponential:
      return kInf;
    case FamilyKind::Poisson:
      return mu0;
    case FamilyKind::Bernoulli:
      return -std::log1p(-mu0);
    case FamilyKind::Custom:
      if (std::isfinite(mean_lo_)) return psi_star(mean_lo_, mu0);
      return numeric_tail_limit(*this, mu0, -1);
  }
  return kInf;
}

double bregman(const PsiFamily& fam, double z, double mu0) {
  require_mean(fam, mu0, "mu0");
  require_closure(fam, z, "z");
  return fam.psi_star(z, mu0);
}

double bregman_grad(const PsiFamily& fam, double z, double mu0) {
  require_mean(fam, mu0, "mu0");
  require_closure(fam, z, "z");
  return fam.psi_star_grad(z, mu0);
}

double inv_bregman(const PsiFamily& fam, double mu0, double d, Side side) {
  require_mean(fam, mu0, "mu0");
  if (!(d >= 0.0)) throw DomainError("divergence level must be nonnegative");
  if (d == 0.0) return mu0;
  const double limit =
      side == Side::Upper ? fam.sup_divergence_upper(mu0) : fam.sup_divergence_lower(mu0);
  if (d >= limit) {
    throw NoSolution("divergence level " + fmt_num(d) + " is not below the limit " +
                     fmt_num(limit) + " on the requested side");
  }
  const double dir = side == Side::Upper ? 1.0 : -1.0;
  if (fam.kind() == FamilyKind::SubGaussian) {
    return mu0 + dir * fam.scale() * std::sqrt(2.0 * d);
  }
  // Bracket [near, far] with D(near) = 0 < d <= D(far).
  double far;
  if (side == Side::Upper && std::isfinite(fam.mean_hi())) {
    far = fam.mean_hi();
  } else if (side == Side::Lower && std::isfinite(fam.mean_lo())) {
    far = fam.mean_lo();
  } else {
    double step = std::max(1.0, std::abs(mu0));
    if (fam.kind() == FamilyKind::SubExponential) step = fam.scale();
    far = mu0 + dir * step;
    int guard = 0;
    while (fam.psi_star(far, mu0) < d) {
      step *= 2.0;
      far = mu0 + dir * step;
      if (++guard > 2000) throw NoSolution("could not bracket divergence inverse");
    }
  }
  auto excess = [&](double z) { return fam.psi_star(z, mu0) - d; };
  auto slope = [&](double z) { return fam.psi_star_grad(z, mu0); };
  // Quadratic guess from the local curvature bound.
  const double guess = mu0 + dir * std::sqrt(2.0 * d * fam.variance_bound(mu0));
  if (side == Side::Upper) {
    return newton_bracketed(mu0, far, guess, excess, slope);
  }
  // D is decreasing to the left of mu0, so flip the orientation.
  return newton_bracketed(far, mu0, guess, [&](double z) { return -excess(z); },
                          [&](double z) { return -slope(z); });
}

double log_lr_like(const PsiFamily& fam, double n, double xbar, double mu1, double mu0) {
  require_mean(fam, mu0, "mu0");
  require_mean(fam, mu1, "mu1");
  require_closure(fam, xbar, "xbar");
  if (mu1 == mu0) return 0.0;
  const double lambda1 = fam.psi_star_grad(mu1, mu0);
  return n * (lambda1 * xbar - fam.psi(lambda1, mu0));
}

double log_lr_like_tangent(const PsiFamily& fam, double n, double xbar, double mu1,
                           double mu0) {
  require_mean(fam, mu0, "mu0");
  require_mean(fam, mu1, "mu1");
  require_closure(fam, xbar, "xbar");
  if (mu1 == mu0) return 0.0;
  return n * (fam.psi_star(mu1, mu0) + fam.psi_star_grad(mu1, mu0) * (xbar - mu1));
}

double log_lr_like_difference(const PsiFamily& fam, double n, double xbar, double mu1,
                              double mu0) {
  require_mean(fam, mu0, "mu0");
  require_mean(fam, mu1, "mu1");
  require_closure(fam, xbar, "xbar");
  const double at_x = fam.psi_star(xbar, mu0);
  const double at_1 = fam.psi_star(mu1, mu0);
  const double slope = fam.psi_star_grad(mu1, mu0);
  // Bregman divergence of psi*_{mu0} between xbar and mu1.
  const double d_x1 = at_x - at_1 - slope * (xbar - mu1);
  return n * (at_x - d_x1);
}

double log_glr_like(const PsiFamily& fam, double n, double xbar, double mu1, double mu0) {
  require_mean(fam, mu0, "mu0");
  require_mean(fam, mu1, "mu1");
  require_closure(fam, xbar, "xbar");
  if (mu1 < mu0) throw InvalidHypotheses("GLR-like statistic needs mu1 >= mu0");
  if (xbar > mu1) return n * fam.psi_star(xbar, mu0);
  if (mu1 == mu0) return 0.0;
  const double tangent = fam.psi_star(mu1, mu0) + fam.psi_star_grad(mu1, mu0) * (xbar - mu1);
  return tangent > 0.0 ? n * tangent : 0.0;
}

double dstar_point(const PsiFamily& fam, double mu, double mu0) {
  require_mean(fam, mu, "mu");
  require_mean(fam, mu0, "mu0");
  if (mu == mu0) return mu;
  const double a = std::min(mu, mu0);
  const double b = std::max(mu, mu0);
  // D_a(z, a) - D_b(z, b) increases from negative to positive on [a, b].
  return bisect_increasing(a, b, [&](double z) { return fam.psi_star(z, a) - fam.psi_star(z, b); });
}

double dstar(const PsiFamily& fam, double mu, double mu0) {
  if (mu == mu0) {
    require_mean(fam, mu, "mu");
    return 0.0;
  }
  const double z = dstar_point(fam, mu, mu0);
  const double a = std::min(mu, mu0);
  const double b = std::max(mu, mu0);
  return std::max(fam.psi_star(z, a), fam.psi_star(z, b));
}

}  // namespace seqglr
