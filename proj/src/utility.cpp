#include "qnet/utility.hpp"

#include <cmath>

namespace qnet {

namespace {

constexpr double kNegDomainMin = 1.0 / 3.0;

double skr_g(double werner) {
  return 1.0 - 2.0 * binary_entropy((1.0 - werner) / 2.0);
}

// log2((1+W)/(1-W)), the derivative of skr_g.
double skr_g_prime(double werner) {
  return std::log2((1.0 + werner) / (1.0 - werner));
}

}  // namespace

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("binary_entropy: p outside [0,1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double e2e_werner(std::span<const double> path_werner) {
  if (path_werner.empty()) {
    throw std::invalid_argument("e2e_werner: empty Werner vector");
  }
  double prod = 1.0;
  for (double w : path_werner) prod *= w;
  return prod;
}

double fidelity_from_werner(double werner) {
  if (werner < 0.0 || werner > 1.0) {
    throw std::invalid_argument("fidelity_from_werner: W outside [0,1]");
  }
  return (3.0 * werner + 1.0) / 4.0;
}

double k_threshold(double f_min) {
  if (!(f_min > 0.25)) {
    throw std::invalid_argument("k_threshold: F_min must exceed 1/4");
  }
  return std::log((4.0 * f_min - 1.0) / 3.0);
}

double skr_domain_min() {
  static const double root = [] {
    double lo = 0.5, hi = 1.0;  // g(0.5) < 0 < g(1)
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (skr_g(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

UtilityKind utility_kind_from_name(const std::string& name) {
  if (name == "skr") return UtilityKind::SKR;
  if (name == "neg") return UtilityKind::NEG;
  if (name == "logprod") return UtilityKind::LOGPROD;
  throw std::invalid_argument("unknown utility kind: " + name);
}

const char* utility_kind_name(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::SKR: return "skr";
    case UtilityKind::NEG: return "neg";
    case UtilityKind::LOGPROD: return "logprod";
  }
  return "?";
}

double Utility::domain_min() const {
  switch (kind) {
    case UtilityKind::SKR: return skr_domain_min();
    case UtilityKind::NEG: return kNegDomainMin;
    case UtilityKind::LOGPROD: return 0.0;
  }
  return 0.0;
}

double Utility::value(double rate, double werner) const {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("utility value: rate must be positive");
  }
  switch (kind) {
    case UtilityKind::SKR: {
      double g = skr_g(werner);
      if (!(g > 0.0)) {
        throw FidelityDomainError("SKR: fidelity below utility domain");
      }
      return std::log(rate * g);
    }
    case UtilityKind::NEG: {
      if (!(werner > kNegDomainMin)) {
        throw FidelityDomainError("NEG: fidelity below utility domain");
      }
      return std::log(rate * (3.0 * werner - 1.0));
    }
    case UtilityKind::LOGPROD:
      if (!(werner > 0.0)) {
        throw FidelityDomainError("LOGPROD: W must be positive");
      }
      return std::log(rate) + logprod_weight * std::log(werner);
  }
  return 0.0;
}

double Utility::rate_derivative(double rate) const {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("rate_derivative: rate must be positive");
  }
  return 1.0 / rate;  // all three kinds are ln(R * g(W)) or ln R + ...
}

double Utility::rate_inverse(double price_sum) const {
  if (!(price_sum > 0.0)) {
    throw std::invalid_argument("rate_inverse: price sum must be positive");
  }
  return 1.0 / price_sum;
}

double Utility::werner_derivative(double werner) const {
  switch (kind) {
    case UtilityKind::SKR: {
      double g = skr_g(werner);
      if (!(g > 0.0)) {
        throw FidelityDomainError("SKR: fidelity below utility domain");
      }
      return skr_g_prime(werner) / g;
    }
    case UtilityKind::NEG:
      if (!(werner > kNegDomainMin)) {
        throw FidelityDomainError("NEG: fidelity below utility domain");
      }
      return 3.0 / (3.0 * werner - 1.0);
    case UtilityKind::LOGPROD:
      if (!(werner > 0.0)) {
        throw FidelityDomainError("LOGPROD: W must be positive");
      }
      return logprod_weight / werner;
  }
  return 0.0;
}

double Utility::werner_second_derivative(double werner) const {
  switch (kind) {
    case UtilityKind::SKR: {
      double g = skr_g(werner);
      if (!(g > 0.0)) {
        throw FidelityDomainError("SKR: fidelity below utility domain");
      }
      double phi = skr_g_prime(werner);
      double phi_prime = 2.0 / ((1.0 - werner * werner) * std::log(2.0));
      return (phi_prime * g - phi * phi) / (g * g);
    }
    case UtilityKind::NEG: {
      if (!(werner > kNegDomainMin)) {
        throw FidelityDomainError("NEG: fidelity below utility domain");
      }
      double denom = 3.0 * werner - 1.0;
      return -9.0 / (denom * denom);
    }
    case UtilityKind::LOGPROD:
      return -logprod_weight / (werner * werner);
  }
  return 0.0;
}

double Utility::f_link(double werner_e2e, double w_link) const {
  if (!(w_link > 0.0)) {
    throw std::invalid_argument("f_link: w_l must be positive");
  }
  return werner_e2e * werner_derivative(werner_e2e) / w_link;
}

double Utility::absolute_factor(double werner) const {
  switch (kind) {
    case UtilityKind::SKR: return std::max(0.0, skr_g(werner));
    case UtilityKind::NEG: return std::max(0.0, 3.0 * werner - 1.0);
    case UtilityKind::LOGPROD: return 1.0;
  }
  return 0.0;
}

}  // namespace qnet
