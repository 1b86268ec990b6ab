#include "embamp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "embamp/errors.hpp"

namespace embamp {

namespace {

void check_cov(const Mat& v, Eigen::Index n, const char* name) {
  if (v.rows() != n || v.cols() != n) throw StructuralError(std::string(name) + ": dimension mismatch");
  if (!v.allFinite()) throw ValidationError(name, "non-finite entries");
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + v.cwiseAbs().maxCoeff()))
    throw ValidationError(name, "must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(v, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 1e-12)) throw ValidationError(name, "must be positive definite");
}

// solve (V_e + V_g) x = dmu with a conditioning guard
Vec pooled_solve(const DiscriminationInput& in) {
  const Mat s = in.cov_e + in.cov_g;
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const auto& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) throw ConditioningError("pooled covariance is singular");
  return es.eigenvectors() * (es.eigenvectors().transpose() * (in.mu_e - in.mu_g)).cwiseQuotient(ev);
}

}  // namespace

void DiscriminationInput::validate() const {
  const auto n = mu_e.size();
  if (n == 0 || mu_g.size() != n) throw StructuralError("discrimination: mean vectors must match and be non-empty");
  check_cov(cov_e, n, "cov_e");
  check_cov(cov_g, n, "cov_g");
}

Vec lda_axis(const DiscriminationInput& in) {
  in.validate();
  if ((in.mu_e - in.mu_g).isZero(0.0)) throw DegenerateError("lda_axis: degenerate separation");
  const Vec w = pooled_solve(in);
  return w / w.norm();
}

double fisher_discriminant(const DiscriminationInput& in) {
  in.validate();
  const Vec d = in.mu_e - in.mu_g;
  if (d.isZero(0.0)) return 0.0;
  return std::max(0.0, 2.0 * d.dot(pooled_solve(in)));
}

double error_probability(double d2) {
  if (!(d2 >= 0.0)) throw ValidationError("d2", "must be >= 0");
  return 0.5 * std::erfc(std::sqrt(d2) / (2.0 * std::sqrt(2.0)));
}

Threshold threshold_unequal(double mu1, double mu2, double s1, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw ValidationError("sigma", "must be > 0");
  if (mu1 == mu2) return {mu1, 0.5};
  if (mu1 > mu2) {
    std::swap(mu1, mu2);
    std::swap(s1, s2);
  }
  double x;
  if (s1 == s2) {
    x = 0.5 * (mu1 + mu2);
  } else {
    const double a = 0.5 / (s1 * s1) - 0.5 / (s2 * s2);
    const double b = -mu1 / (s1 * s1) + mu2 / (s2 * s2);
    const double c = 0.5 * mu1 * mu1 / (s1 * s1) - 0.5 * mu2 * mu2 / (s2 * s2) - std::log(s2 / s1);
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) throw DegenerateError("threshold_unequal: no real threshold");
    const double sq = std::sqrt(disc);
    // numerically stable pair of roots
    const double qq = -0.5 * (b + std::copysign(sq, b));
    const double r1 = qq / a, r2 = qq != 0.0 ? c / qq : r1;
    auto inside = [&](double r) { return r >= mu1 && r <= mu2; };
    if (inside(r1)) x = r1;
    else if (inside(r2)) x = r2;
    else throw DegenerateError("threshold_unequal: no threshold between the means");
  }
  const double p = 0.25 * (std::erfc((x - mu1) / (std::sqrt(2.0) * s1)) + std::erfc((mu2 - x) / (std::sqrt(2.0) * s2)));
  return {x, p};
}

double assignment_fidelity(double d2, double total_T, double t1) {
  if (!(total_T >= 0.0)) throw ValidationError("total_T", "must be >= 0");
  if (!(t1 > 0.0)) throw ValidationError("t1", "must be > 0");
  return (1.0 - error_probability(d2)) * std::exp(-total_T / t1);
}

double nines(double fidelity) {
  if (fidelity >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log10(1.0 - fidelity);
}

void KernelParams::validate() const {
  if (v_xx * v_pp - c_xp * c_xp < 0.25 - 1e-10) throw ValidationError("kernel", "initial moments violate uncertainty");
  if (!(gamma >= 0.0)) throw ValidationError("kernel.gamma", "must be >= 0");
}

double noise_kernel(const KernelParams& kp, double t1, double t2) {
  if (t1 < t2) std::swap(t1, t2);
  const double tau = t1 - t2, sum = t1 + t2;
  const double g = kp.gamma, d = kp.delta;
  const double iso = std::exp(-0.5 * g * tau) * std::cos(d * tau) *
                     (0.5 + 0.5 * std::exp(-g * t2) * (kp.v_xx + kp.v_pp - 1.0));
  const double aniso = 0.5 * std::exp(-0.5 * g * sum) *
                       ((kp.v_xx - kp.v_pp) * std::cos(d * sum) + 2.0 * kp.c_xp * std::sin(d * sum));
  return iso + aniso;
}

double excess_kernel(const KernelParams& kp, double t1, double t2) {
  const double tau = std::abs(t1 - t2);
  return 0.5 * (noise_kernel(kp, t1, t2) - 0.5 * std::exp(-0.5 * kp.gamma * tau) * std::cos(kp.delta * tau));
}

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double h = t[k] - t[k - 1];
    if (!(h > 0.0)) throw StructuralError("time grid must be strictly increasing");
    w[k - 1] += 0.5 * h;
    w[k] += 0.5 * h;
  }
  return w;
}

void HomodyneModel::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("homodyne.eta", "must lie in (0, 1]");
  if (!(gamma_meas >= 0.0)) throw ValidationError("homodyne.gamma_meas", "must be >= 0");
  if (!(n_add >= 0.0)) throw ValidationError("homodyne.n_add", "must be >= 0");
  if (times.size() < 2) throw StructuralError("homodyne: grid needs at least two points");
  if (contrast.size() != times.size() || filter.size() != times.size())
    throw StructuralError("homodyne: contrast, filter and grid sizes differ");
}

std::vector<double> matched_filter(const std::vector<double>& times, const std::vector<double>& contrast) {
  if (times.size() != contrast.size()) throw StructuralError("matched_filter: grid mismatch");
  const auto w = trapezoid_weights(times);
  double norm = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) norm += w[k] * contrast[k] * contrast[k];
  if (!(norm > 0.0)) throw DegenerateError("matched_filter: zero contrast");
  const double s = 1.0 / std::sqrt(norm);
  std::vector<double> g(contrast.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = s * contrast[k];
  return g;
}

namespace {

std::size_t count_until(const std::vector<double>& t, double T) {
  std::size_t m = 0;
  while (m < t.size() && t[m] <= T * (1.0 + 1e-12) + 1e-300) ++m;
  return m;
}

std::vector<double> truncated_weights(const std::vector<double>& t, std::size_t m) {
  return trapezoid_weights(std::vector<double>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(m)));
}

}  // namespace

double integrated_variance(const HomodyneModel& model, const Kernel& kernel, double T) {
  model.validate();
  const std::size_t m = count_until(model.times, T);
  if (m < 2) return 0.0;
  const auto w = truncated_weights(model.times, m);
  double g2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) g2 += w[i] * model.filter[i] * model.filter[i];
  double dbl = 0.0;
  if (kernel) {
    for (std::size_t i = 0; i < m; ++i) {
      const double gi = w[i] * model.filter[i];
      if (gi == 0.0) continue;
      dbl += gi * gi * kernel(model.times[i], model.times[i]);
      double row = 0.0;
      for (std::size_t j = 0; j < i; ++j) row += w[j] * model.filter[j] * kernel(model.times[i], model.times[j]);
      dbl += 2.0 * gi * row;
    }
  }
  return (0.5 + model.n_add) * g2 + 2.0 * model.eta * model.gamma_meas * dbl;
}

double integrated_snr(const HomodyneModel& model, const Kernel& kernel, double T) {
  model.validate();
  const std::size_t m = count_until(model.times, T);
  if (m < 2) return 0.0;
  const auto w = truncated_weights(model.times, m);
  double signal = 0.0;
  for (std::size_t i = 0; i < m; ++i) signal += w[i] * model.filter[i] * model.contrast[i];
  if (signal == 0.0) return 0.0;
  const double var = integrated_variance(model, kernel, T);
  if (!(var > 0.0)) throw DegenerateError("integrated_snr: non-positive variance");
  return signal * signal / var;
}

}  // namespace embamp
