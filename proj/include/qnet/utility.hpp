#pragma once

#include <span>
#include <stdexcept>
#include <string>

namespace qnet {

// Thrown when a (R, W) pair falls outside a utility's domain on the fidelity
// side (distinct from plain argument errors such as R <= 0).
class FidelityDomainError : public std::domain_error {
 public:
  explicit FidelityDomainError(const std::string& what)
      : std::domain_error(what) {}
};

enum class UtilityKind { SKR, NEG, LOGPROD };

UtilityKind utility_kind_from_name(const std::string& name);
const char* utility_kind_name(UtilityKind kind);

// Session utility: SKR and NEG are ln(R * g(W)); LOGPROD is the synthetic
// concave test utility ln R + a * ln W (one scalar weight a per session,
// applied uniformly along the path).
struct Utility {
  UtilityKind kind = UtilityKind::SKR;
  double logprod_weight = 1.0;  // only meaningful for LOGPROD

  double value(double rate, double werner) const;
  double rate_derivative(double rate) const;     // f_r
  double rate_inverse(double price_sum) const;   // f_r^{-1}
  double werner_derivative(double werner) const; // dU/dW
  double werner_second_derivative(double werner) const;  // d2U/dW2
  double f_link(double werner_e2e, double w_link) const; // W*U'/w_l
  // Smallest end-to-end Werner value for which the utility is defined.
  double domain_min() const;
  // Per-pair value factor with the max{0,.} clamp: SKR -> 1-2h((1-W)/2),
  // NEG -> 3W-1, LOGPROD -> 1 (rate counts directly).
  double absolute_factor(double werner) const;
};

double binary_entropy(double p);
double e2e_werner(std::span<const double> path_werner);
double fidelity_from_werner(double werner);
double k_threshold(double f_min);

// Root of 1 - 2h((1-W)/2) = 0, computed once by bisection.
double skr_domain_min();

}  // namespace qnet
