#pragma once

#include <vector>

#include "qnet/qnum.hpp"

namespace qnet {

// Continuous-time counterpart of the primal-dual updates. State is the
// concatenation x = [w, mu, lambda]; rates are eliminated algebraically via
// R_r = 1 / sum of path prices.
struct OdeState {
  std::vector<double> w;
  std::vector<double> mu;
  std::vector<double> lambda;
  double t = 0.0;

  static OdeState from_primal_dual(const PrimalDualState& s);
  PrimalDualState to_primal_dual(const ProblemInstance& inst) const;
  double distance_inf(const OdeState& other) const;
};

// Session rates implied by the prices (capped at 1e12 when a path price sum
// degenerates to zero mid-transient).
std::vector<double> ode_rates(const OdeState& x, const ProblemInstance& inst);

// dx/dt with the one-sided clamps [.]^+ active at lambda = 0, mu = 0 and at
// the w box bounds.
OdeState ode_rhs(const OdeState& x, const ProblemInstance& inst);

struct Trajectory {
  std::vector<OdeState> samples;
  bool blew_up = false;
  double blowup_time = 0.0;
};

// Classical fixed-step 4th-order integration with post-step box projection.
// Aborts (blew_up) when any component magnitude exceeds 1e12.
Trajectory integrate(const OdeState& x0, const ProblemInstance& inst,
                     double dt, double t_end, double sample_every = 0.0);

double lyapunov_value(const OdeState& x, const OdeState& x_star);
double lyapunov_derivative(const OdeState& x, const OdeState& x_star,
                           const ProblemInstance& inst);

// Summand of the Lyapunov-derivative decomposition:
// g(xi, xj) = (xi - xj)/xi + ln(xj/xi), <= 0 for xi, xj in (0, 1).
double lyapunov_g(double xi, double xj);

struct Linearization {
  int n_links = 0;
  int n_sessions = 0;
  std::vector<double> a;       // (2L+R)^2 row-major, blocks [w | mu | lambda]
  std::vector<double> b_diag;  // U''_{w_l}(w*) - sum mu*_r / w*^2
  std::vector<double> jy_eigenvalues;      // spectrum of J_y (symmetric NSD)
  std::vector<bool> theorem2_per_link;     // b_diag[l] < 0
  bool symmetric_part_block_diagonal = false;

  int dim() const { return 2 * n_links + n_sessions; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * dim() + j]; }
};

Linearization linearization_matrix(const OdeState& x_star,
                                   const ProblemInstance& inst);

// Theorem 2 sufficient condition per link: U''_{w_l}(w*) < sum mu*_r / w*^2.
// Second derivatives are the symbolic ones from the utility module.
std::vector<bool> theorem2_condition(const OdeState& x_star,
                                     const ProblemInstance& inst);

// Aggregate d^2 U / d w_l^2 at the state (used for B's diagonal).
double u_second_derivative_link(const OdeState& x, const ProblemInstance& inst,
                                int link);

}  // namespace qnet
