#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qnet/topology.hpp"

namespace qnet {

constexpr double kWernerFloor = 1e-4;

struct ProblemInstance {
  Topology topology;
  std::vector<SessionSpec> sessions;
  std::vector<double> d;        // per link, pairs/s
  std::vector<double> k_min;    // per session, K_r
  std::vector<double> slack;    // per link, DA slack G/T_c (0 when disabled)
  std::vector<std::vector<int>> sessions_on_link;  // link -> session ids

  static ProblemInstance from(const Topology& topo,
                              std::vector<SessionSpec> sessions,
                              double da_slack = 0.0);
  int n_links() const { return static_cast<int>(d.size()); }
  int n_sessions() const { return static_cast<int>(sessions.size()); }
  double capacity(int link, double w) const {
    return d[link] * (1.0 - w) - slack[link];
  }
};

struct StepSizes {
  std::vector<double> k_lambda;  // per link
  std::vector<double> k_mu;     // per session
  std::vector<double> k_w;      // per link
  int t_outer = 1;

  static StepSizes uniform(const ProblemInstance& inst, double k_lambda,
                           double k_mu, double k_w, int t_outer);
};

struct PrimalDualState {
  std::vector<double> rate;    // per session, > 0
  std::vector<double> w;       // per link, [w_floor, 1]
  std::vector<double> lambda;  // per link, >= 0
  std::vector<double> mu;      // per session, >= 0
  int64_t t = 0;
  int64_t zero_price_holds = 0;  // rate updates skipped on all-zero prices
};

// Random feasible initialization: w = 0.967, lambda/mu ~ U(0, 0.1],
// R ~ U(0, d_min / (2 N_max)].
PrimalDualState init_state(const ProblemInstance& inst, uint64_t seed);

void update_lambda(PrimalDualState& s, const ProblemInstance& inst,
                   const StepSizes& steps);
void update_rate(PrimalDualState& s, const ProblemInstance& inst);
void update_mu(PrimalDualState& s, const ProblemInstance& inst,
               const StepSizes& steps);
void update_w(PrimalDualState& s, const ProblemInstance& inst,
              const StepSizes& steps);

// Inner updates (lambda, rate) every call; outer updates (mu, w) when
// t mod t_outer == 0. Increments t.
void bilevel_step(PrimalDualState& s, const ProblemInstance& inst,
                  const StepSizes& steps);

// Infinity norm over projected gradients, complementary slackness and primal
// infeasibility; capacity-family terms are normalized by d_l.
double kkt_residual(const PrimalDualState& s, const ProblemInstance& inst);

// Evaluate f_sum_l = sum over sessions on `link` of W_r U'_r / w_l using the
// state's Werner vector. Out-of-domain W is clamped to domain_min + 1e-3 for
// the derivative (bounded restoring gradient); increments *clamp_count.
double f_sum_link(const PrimalDualState& s, const ProblemInstance& inst,
                  int link, int64_t* clamp_count = nullptr);

double session_werner(const PrimalDualState& s, const ProblemInstance& inst,
                      int session);

// Aggregate utility sum_r U_r(R_r, W_r); W clamped into domain for reporting.
double aggregate_utility(const PrimalDualState& s,
                         const ProblemInstance& inst);
// Aggregate absolute value sum_r R_r * factor_r(W_r).
double aggregate_absolute_value(const PrimalDualState& s,
                                const ProblemInstance& inst);

struct SolveResult {
  PrimalDualState state;
  double utility = 0.0;
  double residual = 0.0;
  int64_t iterations = 0;
  bool converged = false;
};

// Step sizes scaled so the synchronous discrete map contracts:
// k_lambda = 0.4/d_l^2, k_w = 0.1/d_l, k_mu = 1e-2, T_outer = 1.
StepSizes solver_steps(const ProblemInstance& inst);

SolveResult solve_centralized(const ProblemInstance& inst,
                              const StepSizes& steps, double tolerance = 1e-6,
                              int64_t max_iter = 4'000'000,
                              std::optional<PrimalDualState> init = {},
                              uint64_t seed = 1);

struct SlaterPoint {
  std::vector<double> rate;
  std::vector<double> w;
  double delta = 0.0;
  double epsilon = 0.0;
};

// Strictly feasible point per the interior construction: w = 1 - delta with
// N_max * ln(1-delta) > K_max, R = eps < min_l d_l*delta/N_l.
SlaterPoint slater_point(const ProblemInstance& inst);

struct OracleResult {
  std::vector<double> w;
  std::vector<double> rate;
  double utility = 0.0;
  double grid_resolution = 0.0;
};

// Grid search over w in [0,1]^L at 1e-3 resolution with log-fair rates at
// the capacity-tight point; instances limited to <= 2 links, <= 2 sessions.
OracleResult brute_force_oracle(const ProblemInstance& inst,
                                double grid_resolution = 1e-3);

}  // namespace qnet
