#include "qnet/qnum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qnet {

namespace {

double uniform01(std::mt19937_64& rng) {
  // (0, 1]: 53-bit mantissa mapping, never zero; replay-stable across builds.
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Clamp W into the utility domain before evaluating U'; keeps the restoring
// gradient bounded (~1e3) when a transient drives W below the domain.
double clamped_werner(const Utility& u, double w_e2e, int64_t* clamp_count) {
  double lo = u.domain_min() + 1e-3;
  if (w_e2e < lo) {
    if (clamp_count) ++*clamp_count;
    return lo;
  }
  return w_e2e;
}

}  // namespace

ProblemInstance ProblemInstance::from(const Topology& topo,
                                      std::vector<SessionSpec> sessions,
                                      double da_slack) {
  ProblemInstance inst;
  inst.topology = topo;
  inst.sessions = std::move(sessions);
  inst.d.resize(topo.links.size());
  inst.slack.assign(topo.links.size(), da_slack);
  for (const Link& l : topo.links) {
    inst.d[l.id] = link_rate_param(l.length_km, l.chi);
  }
  inst.k_min.resize(inst.sessions.size());
  inst.sessions_on_link.assign(topo.links.size(), {});
  for (size_t r = 0; r < inst.sessions.size(); ++r) {
    const SessionSpec& s = inst.sessions[r];
    path_nodes(topo, s.path, s.source);  // validates contiguity
    inst.k_min[r] = k_threshold(s.f_min);
    for (int lid : s.path) {
      inst.sessions_on_link[lid].push_back(static_cast<int>(r));
    }
  }
  return inst;
}

StepSizes StepSizes::uniform(const ProblemInstance& inst, double k_lambda,
                             double k_mu, double k_w, int t_outer) {
  StepSizes st;
  st.k_lambda.assign(inst.n_links(), k_lambda);
  st.k_w.assign(inst.n_links(), k_w);
  st.k_mu.assign(inst.n_sessions(), k_mu);
  st.t_outer = t_outer;
  return st;
}

PrimalDualState init_state(const ProblemInstance& inst, uint64_t seed) {
  std::mt19937_64 rng(seed);
  PrimalDualState s;
  s.w.assign(inst.n_links(), 0.967);
  s.lambda.resize(inst.n_links());
  for (double& v : s.lambda) v = 0.1 * uniform01(rng);
  s.mu.resize(inst.n_sessions());
  for (double& v : s.mu) v = 0.1 * uniform01(rng);
  double d_min = *std::min_element(inst.d.begin(), inst.d.end());
  size_t n_max = 1;
  for (const auto& v : inst.sessions_on_link) n_max = std::max(n_max, v.size());
  s.rate.resize(inst.n_sessions());
  for (double& v : s.rate) {
    v = uniform01(rng) * d_min / (2.0 * static_cast<double>(n_max));
  }
  return s;
}

double session_werner(const PrimalDualState& s, const ProblemInstance& inst,
                      int session) {
  double prod = 1.0;
  for (int lid : inst.sessions[session].path) prod *= s.w[lid];
  return prod;
}

double f_sum_link(const PrimalDualState& s, const ProblemInstance& inst,
                  int link, int64_t* clamp_count) {
  double sum = 0.0;
  for (int r : inst.sessions_on_link[link]) {
    const Utility& u = inst.sessions[r].utility;
    double w_e2e = clamped_werner(u, session_werner(s, inst, r), clamp_count);
    sum += u.f_link(w_e2e, s.w[link]);
  }
  return sum;
}

void update_lambda(PrimalDualState& s, const ProblemInstance& inst,
                   const StepSizes& steps) {
  for (int l = 0; l < inst.n_links(); ++l) {
    double load = 0.0;
    for (int r : inst.sessions_on_link[l]) load += s.rate[r];
    double grad = load - inst.capacity(l, s.w[l]);
    s.lambda[l] = std::max(s.lambda[l] + steps.k_lambda[l] * grad, 0.0);
  }
}

void update_rate(PrimalDualState& s, const ProblemInstance& inst) {
  for (int r = 0; r < inst.n_sessions(); ++r) {
    double price = 0.0;
    for (int lid : inst.sessions[r].path) price += s.lambda[lid];
    if (price > 0.0) {
      s.rate[r] = 1.0 / price;
    } else {
      ++s.zero_price_holds;  // hold previous rate
    }
  }
}

void update_mu(PrimalDualState& s, const ProblemInstance& inst,
               const StepSizes& steps) {
  for (int r = 0; r < inst.n_sessions(); ++r) {
    double log_w = 0.0;
    for (int lid : inst.sessions[r].path) {
      if (!(s.w[lid] > 0.0)) {
        throw std::domain_error("update_mu: degenerate w_l = 0 on path");
      }
      log_w += std::log(s.w[lid]);
    }
    double grad = inst.k_min[r] - log_w;
    s.mu[r] = std::max(s.mu[r] + steps.k_mu[r] * grad, 0.0);
  }
}

void update_w(PrimalDualState& s, const ProblemInstance& inst,
              const StepSizes& steps) {
  // Jacobi within the family: all w-derivatives use the pre-sweep w vector.
  PrimalDualState snapshot = s;
  for (int l = 0; l < inst.n_links(); ++l) {
    double mu_sum = 0.0;
    for (int r : inst.sessions_on_link[l]) mu_sum += s.mu[r];
    double wdot = -inst.d[l] * s.lambda[l] +
                  f_sum_link(snapshot, inst, l, nullptr) +
                  mu_sum / snapshot.w[l];
    double next = snapshot.w[l] + steps.k_w[l] * wdot;
    s.w[l] = std::clamp(next, kWernerFloor, 1.0);
  }
}

void bilevel_step(PrimalDualState& s, const ProblemInstance& inst,
                  const StepSizes& steps) {
  update_lambda(s, inst, steps);
  update_rate(s, inst);
  if (s.t % steps.t_outer == 0) {
    update_mu(s, inst, steps);
    update_w(s, inst, steps);
  }
  ++s.t;
}

double kkt_residual(const PrimalDualState& s, const ProblemInstance& inst) {
  double res = 0.0;
  auto take = [&res](double v) { res = std::max(res, std::abs(v)); };

  for (int r = 0; r < inst.n_sessions(); ++r) {
    double price = 0.0;
    for (int lid : inst.sessions[r].path) price += s.lambda[lid];
    take(1.0 / s.rate[r] - price);  // stationarity in R (R interior)

    double log_w = 0.0;
    for (int lid : inst.sessions[r].path) log_w += std::log(s.w[lid]);
    double fid_viol = inst.k_min[r] - log_w;
    take(std::max(fid_viol, 0.0));     // primal feasibility
    take(s.mu[r] * fid_viol);          // complementary slackness
  }

  for (int l = 0; l < inst.n_links(); ++l) {
    double load = 0.0;
    for (int r : inst.sessions_on_link[l]) load += s.rate[r];
    double cap_viol = (load - inst.capacity(l, s.w[l])) / inst.d[l];
    take(std::max(cap_viol, 0.0));
    take(s.lambda[l] * cap_viol);
    // projected gradient in lambda
    if (s.lambda[l] > 0.0) {
      take(cap_viol);
    } else {
      take(std::max(cap_viol, 0.0));
    }
    // projected gradient in w
    double mu_sum = 0.0;
    for (int r : inst.sessions_on_link[l]) mu_sum += s.mu[r];
    double wdot = -inst.d[l] * s.lambda[l] + f_sum_link(s, inst, l) +
                  mu_sum / s.w[l];
    if (s.w[l] >= 1.0 && wdot > 0.0) wdot = 0.0;
    if (s.w[l] <= kWernerFloor && wdot < 0.0) wdot = 0.0;
    take(wdot);
  }
  return res;
}

double aggregate_utility(const PrimalDualState& s,
                         const ProblemInstance& inst) {
  double total = 0.0;
  for (int r = 0; r < inst.n_sessions(); ++r) {
    const Utility& u = inst.sessions[r].utility;
    double w_e2e = clamped_werner(u, session_werner(s, inst, r), nullptr);
    total += u.value(s.rate[r], w_e2e);
  }
  return total;
}

double aggregate_absolute_value(const PrimalDualState& s,
                                const ProblemInstance& inst) {
  double total = 0.0;
  for (int r = 0; r < inst.n_sessions(); ++r) {
    const Utility& u = inst.sessions[r].utility;
    total += s.rate[r] * u.absolute_factor(session_werner(s, inst, r));
  }
  return total;
}

StepSizes solver_steps(const ProblemInstance& inst) {
  StepSizes st;
  st.t_outer = 1;
  st.k_lambda.resize(inst.n_links());
  st.k_w.resize(inst.n_links());
  for (int l = 0; l < inst.n_links(); ++l) {
    st.k_lambda[l] = 0.4 / (inst.d[l] * inst.d[l]);
    st.k_w[l] = 0.1 / inst.d[l];
  }
  st.k_mu.assign(inst.n_sessions(), 1e-2);
  return st;
}

SolveResult solve_centralized(const ProblemInstance& inst,
                              const StepSizes& steps, double tolerance,
                              int64_t max_iter,
                              std::optional<PrimalDualState> init,
                              uint64_t seed) {
  StepSizes inner = steps;
  inner.t_outer = 1;  // reference solver: degenerate schedule, zero delay
  SolveResult out;
  out.state = init ? *std::move(init) : init_state(inst, seed);
  constexpr int kCheckEvery = 128;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    bilevel_step(out.state, inst, inner);
    if (out.state.t % kCheckEvery == 0) {
      out.residual = kkt_residual(out.state, inst);
      if (out.residual < tolerance) {
        out.converged = true;
        break;
      }
    }
  }
  out.residual = kkt_residual(out.state, inst);
  out.converged = out.residual < tolerance;
  out.utility = aggregate_utility(out.state, inst);
  return out;
}

SlaterPoint slater_point(const ProblemInstance& inst) {
  if (inst.n_sessions() == 0) {
    throw std::invalid_argument("slater_point: no sessions");
  }
  double k_max = *std::max_element(inst.k_min.begin(), inst.k_min.end());
  if (!(k_max < 0.0)) {
    throw std::invalid_argument(
        "slater_point: some F_min = 1 leaves no strict interior");
  }
  size_t n_route_max = 0;
  for (const SessionSpec& s : inst.sessions) {
    n_route_max = std::max(n_route_max, s.path.size());
  }
  // delta below the value where the longest route meets K_max exactly; the
  // max route length is the binding one (the paper states it with the
  // shortest route, which is not sufficient for longer paths).
  SlaterPoint p;
  p.delta = 0.5 * (1.0 - std::exp(k_max / static_cast<double>(n_route_max)));
  double eps_sup = std::numeric_limits<double>::infinity();
  for (int l = 0; l < inst.n_links(); ++l) {
    size_t n_l = inst.sessions_on_link[l].size();
    if (n_l == 0) continue;
    eps_sup = std::min(eps_sup, inst.d[l] * p.delta / static_cast<double>(n_l));
  }
  p.epsilon = std::isfinite(eps_sup) ? 0.5 * eps_sup : 1.0;
  p.w.assign(inst.n_links(), 1.0 - p.delta);
  p.rate.assign(inst.n_sessions(), p.epsilon);
  return p;
}

OracleResult brute_force_oracle(const ProblemInstance& inst,
                                double grid_resolution) {
  if (inst.n_links() > 2 || inst.n_sessions() > 2 || inst.n_sessions() == 0) {
    throw std::invalid_argument(
        "brute_force_oracle: instance too large (<= 2 links, <= 2 sessions)");
  }
  const int n_l = inst.n_links();
  const int n_r = inst.n_sessions();
  const int steps = static_cast<int>(std::round(1.0 / grid_resolution));

  // Log-fair rates at the capacity-tight point for a given w grid point.
  auto rates_for = [&](const std::vector<double>& w,
                       std::vector<double>& rate) -> bool {
    std::vector<double> cap(n_l);
    for (int l = 0; l < n_l; ++l) {
      cap[l] = inst.capacity(l, w[l]);
      if (!inst.sessions_on_link[l].empty() && cap[l] <= 0.0) return false;
    }
    if (n_r == 1) {
      double c = std::numeric_limits<double>::infinity();
      for (int lid : inst.sessions[0].path) c = std::min(c, cap[lid]);
      rate[0] = c;
      return std::isfinite(c) && c > 0.0;
    }
    // two sessions: shared-link sum cap + per-session own caps
    double c_shared = std::numeric_limits<double>::infinity();
    std::array<double, 2> own{std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity()};
    for (int l = 0; l < n_l; ++l) {
      const auto& on = inst.sessions_on_link[l];
      if (on.size() == 2) {
        c_shared = std::min(c_shared, cap[l]);
      } else if (on.size() == 1) {
        own[on[0]] = std::min(own[on[0]], cap[l]);
      }
    }
    if (!std::isfinite(c_shared)) {
      rate[0] = own[0];
      rate[1] = own[1];
    } else if (own[0] + own[1] <= c_shared) {
      rate[0] = own[0];
      rate[1] = own[1];
    } else if (own[0] <= c_shared / 2.0) {
      rate[0] = own[0];
      rate[1] = std::min(own[1], c_shared - own[0]);
    } else if (own[1] <= c_shared / 2.0) {
      rate[1] = own[1];
      rate[0] = std::min(own[0], c_shared - own[1]);
    } else {
      rate[0] = rate[1] = c_shared / 2.0;
    }
    return std::isfinite(rate[0]) && std::isfinite(rate[1]) &&
           rate[0] > 0.0 && rate[1] > 0.0;
  };

  OracleResult best;
  best.grid_resolution = grid_resolution;
  best.utility = -std::numeric_limits<double>::infinity();
  std::vector<double> w(n_l), rate(n_r);
  std::vector<int> idx(n_l, 0);
  for (;;) {
    for (int l = 0; l < n_l; ++l) w[l] = idx[l] * grid_resolution;
    bool ok = rates_for(w, rate);
    if (ok) {
      double total = 0.0;
      for (int r = 0; r < n_r && ok; ++r) {
        double w_e2e = 1.0;
        double log_w = 0.0;
        for (int lid : inst.sessions[r].path) {
          w_e2e *= w[lid];
          log_w += std::log(std::max(w[lid], 1e-300));
        }
        if (log_w < inst.k_min[r] || w_e2e <= inst.sessions[r].utility.domain_min()) {
          ok = false;
          break;
        }
        total += inst.sessions[r].utility.value(rate[r], w_e2e);
      }
      if (ok && total > best.utility) {
        best.utility = total;
        best.w = w;
        best.rate = rate;
      }
    }
    int l = 0;
    while (l < n_l && ++idx[l] > steps) idx[l++] = 0;
    if (l == n_l) break;
  }
  if (!std::isfinite(best.utility)) {
    throw std::domain_error("brute_force_oracle: no feasible grid point");
  }
  return best;
}

}  // namespace qnet
