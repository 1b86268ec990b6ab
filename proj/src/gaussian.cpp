#include "embamp/gaussian.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

namespace embamp {

GaussianState GaussianState::vacuum(int n_modes) {
  if (n_modes < 1) throw StructuralError("vacuum: n_modes must be >= 1");
  GaussianState s;
  s.means = Vec::Zero(2 * n_modes);
  s.cov = 0.5 * Mat::Identity(2 * n_modes, 2 * n_modes);
  return s;
}

GaussianState GaussianState::coherent(int n_modes, int mode, double q, double p) {
  GaussianState s = vacuum(n_modes);
  if (mode < 0 || mode >= n_modes) throw StructuralError("coherent: mode out of range");
  s.means(2 * mode) = q;
  s.means(2 * mode + 1) = p;
  return s;
}

SymplecticForm symplectic_form(int n_modes) {
  if (n_modes < 1) throw StructuralError("symplectic_form: n_modes must be >= 1");
  SymplecticForm f;
  f.n_modes = n_modes;
  f.matrix = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    f.matrix(2 * k, 2 * k + 1) = 1.0;
    f.matrix(2 * k + 1, 2 * k) = -1.0;
  }
  return f;
}

GeneratorSpec GeneratorSpec::zero(int n_modes) {
  GeneratorSpec g;
  g.hmat = Mat::Zero(2 * n_modes, 2 * n_modes);
  g.decay = Vec::Zero(2 * n_modes);
  g.drive = Vec::Zero(2 * n_modes);
  return g;
}

void GeneratorSpec::set_decay(int mode, double gamma) {
  decay(2 * mode) = gamma;
  decay(2 * mode + 1) = gamma;
}

void GeneratorSpec::validate() const {
  const auto n = hmat.rows();
  if (hmat.cols() != n || n % 2 != 0 || n == 0)
    throw StructuralError("generator: hmat must be square with even dimension");
  if (decay.size() != n) throw StructuralError("generator: decay size does not match hmat");
  if (drive.size() != n) throw StructuralError("generator: drive size does not match hmat");
  for (Eigen::Index k = 0; k < n; k += 2) {
    if (decay(k) < 0.0) throw StructuralError("generator: negative decay");
    if (decay(k) != decay(k + 1)) throw StructuralError("generator: unequal decay within a mode pair");
  }
}

Mat build_drift(const GeneratorSpec& spec) {
  const auto n = spec.hmat.rows();
  if (spec.hmat.cols() != n || spec.decay.size() != n || n % 2 != 0)
    throw StructuralError("build_drift: dimension mismatch between hmat and decay");
  // Omega * H without forming Omega: row pairs (q, p) -> (H_p, -H_q)
  Mat a(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) {
    a.row(k) = spec.hmat.row(k + 1);
    a.row(k + 1) = -spec.hmat.row(k);
  }
  a.diagonal() -= 0.5 * spec.decay;
  return a;
}

void add_rotation(Mat& h, int mode, double omega) {
  h(2 * mode, 2 * mode) += omega;
  h(2 * mode + 1, 2 * mode + 1) += omega;
}

void add_squeeze(Mat& h, int mode, double r, double phi) {
  const int q = 2 * mode, p = q + 1;
  const double c = r * std::cos(phi), s = r * std::sin(phi);
  h(q, q) += c;
  h(p, p) -= c;
  h(q, p) += s;
  h(p, q) += s;
}

void add_conversion(Mat& h, int mode_a, int mode_b, double c, double theta) {
  const int qa = 2 * mode_a, pa = qa + 1, qb = 2 * mode_b, pb = qb + 1;
  const double cc = c * std::cos(theta), cs = c * std::sin(theta);
  h(qa, qb) += cc;
  h(qb, qa) += cc;
  h(pa, pb) += cc;
  h(pb, pa) += cc;
  h(qa, pb) -= cs;
  h(pb, qa) -= cs;
  h(pa, qb) += cs;
  h(qb, pa) += cs;
}

void add_drive(Vec& d, int mode, double eta, double theta) {
  d(2 * mode) += eta * std::sin(theta);
  d(2 * mode + 1) -= eta * std::cos(theta);
}

void check_finite(const GaussianState& s, const char* where) {
  if (!s.means.allFinite() || !s.cov.allFinite())
    throw NumericOverflow(std::string(where) + ": non-finite state at t=" + std::to_string(s.time));
}

GaussianState step(const GaussianState& state, const GeneratorSpec& spec, double dt) {
  if (!(dt > 0.0)) throw StructuralError("step: dt must be positive");
  if (spec.dim() != state.means.size()) throw StructuralError("step: generator and state dimensions differ");
  return step_tv(state, [&](double) -> const GeneratorSpec& { return spec; }, dt);
}

Mat expm(const Mat& a) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const auto n = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const Mat x = a / std::ldexp(1.0, s);
  const Mat id = Mat::Identity(n, n);
  const Mat x2 = x * x, x4 = x2 * x2, x6 = x4 * x2;
  const Mat u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const Mat v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

PropagatorMatrix propagator(const GeneratorSpec& spec, double t) {
  spec.validate();
  if (t < 0.0) throw StructuralError("propagator: negative duration");
  const Mat at = build_drift(spec) * t;
  const double norm = at.cwiseAbs().colwise().sum().maxCoeff();
  if (norm > 50.0)
    throw ConditioningError("propagator: |drift*t| = " + std::to_string(norm) + " exceeds 50, subdivide");
  const bool lossless = spec.decay.isZero(0.0);
  if (t == 0.0) return {Mat::Identity(at.rows(), at.cols()), 0.0, lossless};
  return {expm(at), t, lossless};
}

GaussianState evolve_exact(const GaussianState& state, const GeneratorSpec& spec, double t) {
  spec.validate();
  const auto n = spec.dim();
  if (state.means.size() != n) throw StructuralError("evolve_exact: dimension mismatch");
  if (t < 0.0) throw StructuralError("evolve_exact: negative duration");
  GaussianState out = state;
  if (t == 0.0) return out;

  const Mat a = build_drift(spec);
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff() * t;
  const int pieces = std::max(1, static_cast<int>(std::ceil(norm / 4.0)));
  const double h = t / pieces;

  Mat aug = Mat::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = a * h;
  aug.topRightCorner(n, 1) = spec.drive * h;
  const Mat ea = expm(aug);
  const Mat phi = ea.topLeftCorner(n, n);
  const Vec kick = ea.topRightCorner(n, 1);

  Mat vl = Mat::Zero(2 * n, 2 * n);
  vl.topLeftCorner(n, n) = -a * h;
  vl.topRightCorner(n, n) = (0.5 * spec.decay).asDiagonal();
  vl.topRightCorner(n, n) *= h;
  vl.bottomRightCorner(n, n) = a.transpose() * h;
  const Mat ev = expm(vl);
  const Mat noise = ev.bottomRightCorner(n, n).transpose() * ev.topRightCorner(n, n);

  for (int k = 0; k < pieces; ++k) {
    out.means = phi * out.means + kick;
    Mat v = phi * out.cov * phi.transpose() + noise;
    out.cov = 0.5 * (v + v.transpose());
  }
  out.time = state.time + t;
  check_finite(out, "evolve_exact");
  return out;
}

PropagatorMatrix propagate_squeeze_analytic(double r, double phi, double chi, double gamma, double t) {
  if (!std::isfinite(r) || !std::isfinite(phi) || !std::isfinite(chi) || !std::isfinite(gamma) || !std::isfinite(t))
    throw NumericOverflow("propagate_squeeze_analytic: non-finite input");
  const double k2 = r * r - chi * chi;
  double ch, sh_k;  // cosh(kt), sinh(kt)/k
  if (std::abs(k2) < 1e-6 * r * r || (r == 0.0 && chi == 0.0)) {
    const double z = k2 * t * t;
    ch = 0.0;
    sh_k = 0.0;
    double term_c = 1.0, term_s = t;
    for (int m = 0; m < 60; ++m) {
      ch += term_c;
      sh_k += term_s;
      term_c *= z / ((2 * m + 1) * (2 * m + 2));
      term_s *= z / ((2 * m + 2) * (2 * m + 3));
      if (std::abs(term_c) < 1e-18 * std::abs(ch) && std::abs(term_s) < 1e-18 * std::abs(sh_k)) break;
    }
  } else if (k2 > 0.0) {
    const double k = std::sqrt(k2);
    ch = std::cosh(k * t);
    sh_k = std::sinh(k * t) / k;
  } else {
    const double k = std::sqrt(-k2);
    ch = std::cos(k * t);
    sh_k = std::sin(k * t) / k;
  }
  Mat s(2, 2);
  s << ch + r * std::sin(phi) * sh_k, (chi - r * std::cos(phi)) * sh_k,
      -(chi + r * std::cos(phi)) * sh_k, ch - r * std::sin(phi) * sh_k;
  s *= std::exp(-0.5 * gamma * t);
  return {s, t, gamma == 0.0};
}

double photon_number(const GaussianState& s, int mode) {
  if (mode < 0 || mode >= s.n_modes()) throw StructuralError("photon_number: mode out of range");
  const int q = 2 * mode, p = q + 1;
  return 0.5 * (s.cov(q, q) + s.cov(p, p) - 1.0) + 0.5 * (s.means(q) * s.means(q) + s.means(p) * s.means(p));
}

double uncertainty_min_eigenvalue(const Mat& cov) {
  const auto n = cov.rows();
  const Mat omega = symplectic_form(static_cast<int>(n / 2)).matrix;
  Eigen::MatrixXcd m = cov.cast<std::complex<double>>();
  m += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double squeezing_db(const Mat& cov, int mode) {
  const Eigen::Matrix2d block = cov.block<2, 2>(2 * mode, 2 * mode);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block, Eigen::EigenvaluesOnly);
  return -10.0 * std::log10(es.eigenvalues()(0) / 0.5);
}

}  // namespace embamp
