#pragma once

#include <Eigen/Dense>

#include "embamp/errors.hpp"

namespace embamp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Quadrature ordering (q1, p1, ..., qN, pN), vacuum covariance I/2.
struct GaussianState {
  Vec means;
  Mat cov;
  double time = 0.0;

  int n_modes() const { return static_cast<int>(means.size() / 2); }

  static GaussianState vacuum(int n_modes);
  static GaussianState coherent(int n_modes, int mode, double q, double p);
};

struct SymplecticForm {
  int n_modes = 0;
  Mat matrix;
};

SymplecticForm symplectic_form(int n_modes);

// hmat is the Hessian of the quadrature Hamiltonian, H = X^T hmat X / 2.
// decay holds the diagonal of Gamma (one rate repeated per q,p pair).
struct GeneratorSpec {
  Mat hmat;
  Vec decay;
  Vec drive;

  static GeneratorSpec zero(int n_modes);
  int dim() const { return static_cast<int>(hmat.rows()); }
  void validate() const;
  void set_decay(int mode, double gamma);
};

struct PropagatorMatrix {
  Mat matrix;
  double duration = 0.0;
  bool lossless = true;
};

Mat build_drift(const GeneratorSpec& spec);

// Quadratic blocks added onto hmat. Rates in rad/s.
void add_rotation(Mat& hmat, int mode, double omega);
// phase convention: phi = pi/2 amplifies q and squeezes p
void add_squeeze(Mat& hmat, int mode, double r, double phi);
// H = c (e^{i theta} a^dag b + h.c.)
void add_conversion(Mat& hmat, int mode_a, int mode_b, double c, double theta);
// quadrature drive d = eta (sin theta, -cos theta)
void add_drive(Vec& drive, int mode, double eta, double theta);

GaussianState step(const GaussianState& state, const GeneratorSpec& spec, double dt);

// Time-dependent variant; spec_at(t) is evaluated at the RK4 stage times.
template <class SpecAt>
GaussianState step_tv(const GaussianState& state, SpecAt&& spec_at, double dt);

Mat expm(const Mat& a);

PropagatorMatrix propagator(const GeneratorSpec& spec, double t);

// Exact evolution for a constant generator (block exponentials); splits long
// intervals so each exponential stays well conditioned.
GaussianState evolve_exact(const GaussianState& state, const GeneratorSpec& spec, double t);

PropagatorMatrix propagate_squeeze_analytic(double r, double phi, double chi, double gamma, double t);

double photon_number(const GaussianState& state, int mode);

// min eigenvalue of the Hermitian matrix V + i Omega / 2
double uncertainty_min_eigenvalue(const Mat& cov);

// squeezing of one mode in dB, positive when below vacuum
double squeezing_db(const Mat& cov, int mode);

void check_finite(const GaussianState& s, const char* where);

namespace detail {

struct Derivs {
  Vec dmu;
  Mat dv;
};

inline Derivs rhs(const Mat& a, const GeneratorSpec& spec, const Vec& mu, const Mat& v) {
  Derivs d;
  d.dmu = a * mu + spec.drive;
  Mat av = a * v;
  d.dv = av + av.transpose();
  d.dv.diagonal() += 0.5 * spec.decay;
  return d;
}

}  // namespace detail

template <class SpecAt>
GaussianState step_tv(const GaussianState& state, SpecAt&& spec_at, double dt) {
  const double t = state.time;
  const GeneratorSpec s1 = spec_at(t);
  const GeneratorSpec s2 = spec_at(t + 0.5 * dt);
  const GeneratorSpec s4 = spec_at(t + dt);
  const Mat a1 = build_drift(s1), a2 = build_drift(s2), a4 = build_drift(s4);

  auto k1 = detail::rhs(a1, s1, state.means, state.cov);
  auto k2 = detail::rhs(a2, s2, state.means + 0.5 * dt * k1.dmu, state.cov + 0.5 * dt * k1.dv);
  auto k3 = detail::rhs(a2, s2, state.means + 0.5 * dt * k2.dmu, state.cov + 0.5 * dt * k2.dv);
  auto k4 = detail::rhs(a4, s4, state.means + dt * k3.dmu, state.cov + dt * k3.dv);

  GaussianState out;
  out.means = state.means + (dt / 6.0) * (k1.dmu + 2.0 * k2.dmu + 2.0 * k3.dmu + k4.dmu);
  Mat v = state.cov + (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  out.cov = 0.5 * (v + v.transpose());
  out.time = t + dt;
  check_finite(out, "step");
  return out;
}

}  // namespace embamp
