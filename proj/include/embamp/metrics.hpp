#pragma once

#include <functional>
#include <vector>

#include "embamp/gaussian.hpp"

namespace embamp {

struct DiscriminationInput {
  Vec mu_e;
  Vec mu_g;
  Mat cov_e;
  Mat cov_g;

  void validate() const;
};

// unit vector along (cov_e + cov_g)^{-1} (mu_e - mu_g)
Vec lda_axis(const DiscriminationInput& in);

// dmu^T ((V_e + V_g)/2)^{-1} dmu
double fisher_discriminant(const DiscriminationInput& in);

// (1/2) erfc(sqrt(d2) / (2 sqrt 2)), equal priors
double error_probability(double d2);

struct Threshold {
  double x_th = 0.0;
  double p_err = 0.5;
};

Threshold threshold_unequal(double mu1, double mu2, double s1, double s2);

// (1 - p_mis) e^{-T/T1}
double assignment_fidelity(double d2, double total_T, double t1);

double nines(double fidelity);

struct KernelParams {
  double v_xx = 0.5;
  double v_pp = 0.5;
  double c_xp = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  void validate() const;
};

// symmetrized two-time correlation of q for a decaying, detuned mode with
// initial second moments (vacuum equal-time value 1/2)
double noise_kernel(const KernelParams& kp, double t1, double t2);

// the part of the kernel above vacuum, in amplitude units X' = q / sqrt 2
double excess_kernel(const KernelParams& kp, double t1, double t2);

using Kernel = std::function<double(double, double)>;

struct HomodyneModel {
  double eta = 1.0;
  double gamma_meas = 0.0;
  double n_add = 0.0;
  std::vector<double> times;
  std::vector<double> contrast;
  std::vector<double> filter;

  void validate() const;
};

std::vector<double> matched_filter(const std::vector<double>& times, const std::vector<double>& contrast);

// trapezoid weights on a grid
std::vector<double> trapezoid_weights(const std::vector<double>& times);

double integrated_variance(const HomodyneModel& model, const Kernel& kernel, double T);

double integrated_snr(const HomodyneModel& model, const Kernel& kernel, double T);

}  // namespace embamp
