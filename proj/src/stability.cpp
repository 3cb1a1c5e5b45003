#include "qnet/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnet {

namespace {

constexpr double kRateCap = 1e12;
constexpr double kBlowup = 1e12;

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

OdeState OdeState::from_primal_dual(const PrimalDualState& s) {
  OdeState x;
  x.w = s.w;
  x.mu = s.mu;
  x.lambda = s.lambda;
  return x;
}

PrimalDualState OdeState::to_primal_dual(const ProblemInstance& inst) const {
  PrimalDualState s;
  s.w = w;
  s.mu = mu;
  s.lambda = lambda;
  s.rate = ode_rates(*this, inst);
  return s;
}

double OdeState::distance_inf(const OdeState& other) const {
  double d = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    d = std::max(d, std::abs(w[i] - other.w[i]));
  }
  for (size_t i = 0; i < mu.size(); ++i) {
    d = std::max(d, std::abs(mu[i] - other.mu[i]));
  }
  for (size_t i = 0; i < lambda.size(); ++i) {
    d = std::max(d, std::abs(lambda[i] - other.lambda[i]));
  }
  return d;
}

std::vector<double> ode_rates(const OdeState& x, const ProblemInstance& inst) {
  std::vector<double> rate(inst.n_sessions());
  for (int r = 0; r < inst.n_sessions(); ++r) {
    double price = 0.0;
    for (int lid : inst.sessions[r].path) price += x.lambda[lid];
    rate[r] = price > 1.0 / kRateCap ? 1.0 / price : kRateCap;
  }
  return rate;
}

OdeState ode_rhs(const OdeState& x, const ProblemInstance& inst) {
  OdeState dx;
  dx.w.assign(inst.n_links(), 0.0);
  dx.mu.assign(inst.n_sessions(), 0.0);
  dx.lambda.assign(inst.n_links(), 0.0);
  dx.t = 1.0;

  std::vector<double> rate = ode_rates(x, inst);
  // Evaluate on the box-clamped state; RK4 intermediate stages may sit
  // slightly outside and log/1/w must stay finite there.
  PrimalDualState view;
  view.w = x.w;
  for (double& v : view.w) v = std::clamp(v, kWernerFloor, 1.0);
  std::vector<double> mu_eff = x.mu;
  for (double& v : mu_eff) v = std::max(v, 0.0);

  for (int l = 0; l < inst.n_links(); ++l) {
    double mu_sum = 0.0;
    double load = 0.0;
    for (int r : inst.sessions_on_link[l]) {
      mu_sum += mu_eff[r];
      load += rate[r];
    }
    double wdot = -inst.d[l] * std::max(x.lambda[l], 0.0) +
                  f_sum_link(view, inst, l) + mu_sum / view.w[l];
    // one-sided clamp at the w box bounds
    if (x.w[l] >= 1.0 && wdot > 0.0) wdot = 0.0;
    if (x.w[l] <= kWernerFloor && wdot < 0.0) wdot = 0.0;
    dx.w[l] = wdot;

    double ldot = load - inst.capacity(l, view.w[l]);
    if (x.lambda[l] <= 0.0 && ldot < 0.0) ldot = 0.0;
    dx.lambda[l] = ldot;
  }
  for (int r = 0; r < inst.n_sessions(); ++r) {
    double log_w = 0.0;
    for (int lid : inst.sessions[r].path) log_w += std::log(view.w[lid]);
    double mdot = inst.k_min[r] - log_w;
    if (x.mu[r] <= 0.0 && mdot < 0.0) mdot = 0.0;
    dx.mu[r] = mdot;
  }
  return dx;
}

namespace {

void project_box(OdeState& x) {
  for (double& v : x.w) v = std::clamp(v, kWernerFloor, 1.0);
  for (double& v : x.mu) v = std::max(v, 0.0);
  for (double& v : x.lambda) v = std::max(v, 0.0);
}

bool exceeds_blowup(const OdeState& x) {
  for (double v : x.w) {
    if (!std::isfinite(v) || std::abs(v) > kBlowup) return true;
  }
  for (double v : x.mu) {
    if (!std::isfinite(v) || std::abs(v) > kBlowup) return true;
  }
  for (double v : x.lambda) {
    if (!std::isfinite(v) || std::abs(v) > kBlowup) return true;
  }
  return false;
}

OdeState rk4_step(const OdeState& x, const ProblemInstance& inst, double dt) {
  OdeState k1 = ode_rhs(x, inst);
  OdeState mid = x;
  axpy(mid.w, dt / 2, k1.w);
  axpy(mid.mu, dt / 2, k1.mu);
  axpy(mid.lambda, dt / 2, k1.lambda);
  OdeState k2 = ode_rhs(mid, inst);
  mid = x;
  axpy(mid.w, dt / 2, k2.w);
  axpy(mid.mu, dt / 2, k2.mu);
  axpy(mid.lambda, dt / 2, k2.lambda);
  OdeState k3 = ode_rhs(mid, inst);
  mid = x;
  axpy(mid.w, dt, k3.w);
  axpy(mid.mu, dt, k3.mu);
  axpy(mid.lambda, dt, k3.lambda);
  OdeState k4 = ode_rhs(mid, inst);

  OdeState next = x;
  for (size_t i = 0; i < x.w.size(); ++i) {
    next.w[i] += dt / 6 * (k1.w[i] + 2 * k2.w[i] + 2 * k3.w[i] + k4.w[i]);
  }
  for (size_t i = 0; i < x.mu.size(); ++i) {
    next.mu[i] += dt / 6 * (k1.mu[i] + 2 * k2.mu[i] + 2 * k3.mu[i] + k4.mu[i]);
  }
  for (size_t i = 0; i < x.lambda.size(); ++i) {
    next.lambda[i] += dt / 6 * (k1.lambda[i] + 2 * k2.lambda[i] +
                                2 * k3.lambda[i] + k4.lambda[i]);
  }
  next.t = x.t + dt;
  return next;
}

}  // namespace

Trajectory integrate(const OdeState& x0, const ProblemInstance& inst,
                     double dt, double t_end, double sample_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (sample_every <= 0.0) sample_every = dt;
  Trajectory traj;
  OdeState x = x0;
  project_box(x);
  traj.samples.push_back(x);
  double next_sample = x.t + sample_every;
  while (x.t < t_end - dt / 2) {
    x = rk4_step(x, inst, dt);
    project_box(x);
    if (exceeds_blowup(x)) {
      traj.blew_up = true;
      traj.blowup_time = x.t;
      traj.samples.push_back(x);
      return traj;
    }
    if (x.t >= next_sample - dt / 2) {
      traj.samples.push_back(x);
      next_sample += sample_every;
    }
  }
  if (traj.samples.back().t < x.t) traj.samples.push_back(x);
  return traj;
}

double lyapunov_value(const OdeState& x, const OdeState& x_star) {
  double v = 0.0;
  for (size_t i = 0; i < x.w.size(); ++i) {
    v += 0.5 * (x.w[i] - x_star.w[i]) * (x.w[i] - x_star.w[i]);
  }
  for (size_t i = 0; i < x.mu.size(); ++i) {
    v += 0.5 * (x.mu[i] - x_star.mu[i]) * (x.mu[i] - x_star.mu[i]);
  }
  for (size_t i = 0; i < x.lambda.size(); ++i) {
    v += 0.5 * (x.lambda[i] - x_star.lambda[i]) *
         (x.lambda[i] - x_star.lambda[i]);
  }
  return v;
}

double lyapunov_derivative(const OdeState& x, const OdeState& x_star,
                           const ProblemInstance& inst) {
  OdeState dx = ode_rhs(x, inst);
  double vdot = 0.0;
  for (size_t i = 0; i < x.w.size(); ++i) {
    vdot += (x.w[i] - x_star.w[i]) * dx.w[i];
  }
  for (size_t i = 0; i < x.mu.size(); ++i) {
    vdot += (x.mu[i] - x_star.mu[i]) * dx.mu[i];
  }
  for (size_t i = 0; i < x.lambda.size(); ++i) {
    vdot += (x.lambda[i] - x_star.lambda[i]) * dx.lambda[i];
  }
  return vdot;
}

double lyapunov_g(double xi, double xj) {
  return (xi - xj) / xi + std::log(xj / xi);
}

double u_second_derivative_link(const OdeState& x, const ProblemInstance& inst,
                                int link) {
  // d2 U_r / d w_l^2 = U''_WW(W) * (W / w_l)^2, summed over sessions on l.
  double sum = 0.0;
  for (int r : inst.sessions_on_link[link]) {
    const Utility& u = inst.sessions[r].utility;
    double w_e2e = 1.0;
    for (int lid : inst.sessions[r].path) w_e2e *= x.w[lid];
    double ratio = w_e2e / x.w[link];
    sum += u.werner_second_derivative(w_e2e) * ratio * ratio;
  }
  return sum;
}

std::vector<bool> theorem2_condition(const OdeState& x_star,
                                     const ProblemInstance& inst) {
  std::vector<bool> ok(inst.n_links());
  for (int l = 0; l < inst.n_links(); ++l) {
    double mu_term = 0.0;
    for (int r : inst.sessions_on_link[l]) {
      mu_term += x_star.mu[r] / (x_star.w[l] * x_star.w[l]);
    }
    ok[l] = u_second_derivative_link(x_star, inst, l) < mu_term;
  }
  return ok;
}

Linearization linearization_matrix(const OdeState& x_star,
                                   const ProblemInstance& inst) {
  Linearization lin;
  lin.n_links = inst.n_links();
  lin.n_sessions = inst.n_sessions();
  const int L = lin.n_links;
  const int R = lin.n_sessions;
  const int n = lin.dim();
  lin.a.assign(static_cast<size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return lin.a[static_cast<size_t>(i) * n + j];
  };

  std::vector<double> rate = ode_rates(x_star, inst);

  lin.b_diag.resize(L);
  for (int l = 0; l < L; ++l) {
    double mu_term = 0.0;
    for (int r : inst.sessions_on_link[l]) {
      mu_term += x_star.mu[r] / (x_star.w[l] * x_star.w[l]);
    }
    lin.b_diag[l] = u_second_derivative_link(x_star, inst, l) - mu_term;
    at(l, l) = lin.b_diag[l];
  }
  // w-mu coupling W^{-1} R and its negative transpose; w-lambda coupling
  // -D and +D (D = diag(d_l); the paper's unit-d normalization lifted back).
  for (int l = 0; l < L; ++l) {
    for (int r : inst.sessions_on_link[l]) {
      at(l, L + r) = 1.0 / x_star.w[l];
      at(L + r, l) = -1.0 / x_star.w[l];
    }
    at(l, L + R + l) = -inst.d[l];
    at(L + R + l, l) = inst.d[l];
  }
  // J_y = Rmat J_f^{-1} Rmat^T with J_f = diag(-1/R_r^2)
  Eigen::MatrixXd jy = Eigen::MatrixXd::Zero(L, L);
  for (int r = 0; r < R; ++r) {
    double jf_inv = -rate[r] * rate[r];
    for (int li : inst.sessions[r].path) {
      for (int lj : inst.sessions[r].path) jy(li, lj) += jf_inv;
    }
  }
  for (int li = 0; li < L; ++li) {
    for (int lj = 0; lj < L; ++lj) at(L + R + li, L + R + lj) = jy(li, lj);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (jy + jy.transpose()));
  lin.jy_eigenvalues.assign(es.eigenvalues().data(),
                            es.eigenvalues().data() + L);

  lin.theorem2_per_link.resize(L);
  for (int l = 0; l < L; ++l) lin.theorem2_per_link[l] = lin.b_diag[l] < 0.0;

  // verify A + A^T has only the (w,w) and (lambda,lambda) blocks
  lin.symmetric_part_block_diagonal = true;
  for (int i = 0; i < n && lin.symmetric_part_block_diagonal; ++i) {
    for (int j = 0; j < n; ++j) {
      double sym = lin.a[static_cast<size_t>(i) * n + j] +
                   lin.a[static_cast<size_t>(j) * n + i];
      bool ww = i < L && j < L;
      bool ll = i >= L + R && j >= L + R;
      if (!ww && !ll && std::abs(sym) > 1e-12) {
        lin.symmetric_part_block_diagonal = false;
        break;
      }
    }
  }
  return lin;
}

}  // namespace qnet
