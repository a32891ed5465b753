#pragma once

// Randomized check that two orthogonal branch states
//   psi_A = a |alpha> + c1 |gamma>,   psi_B = b |beta> - c2 |gamma>,
// with |gamma> orthogonal to both |alpha> and |beta>, force
//   <alpha|beta> = conj(c1) c2 / (conj(a) b),
// so the parts that survive the cancellation of |gamma> overlap whenever
// c1 c2 != 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "whichway/error.hpp"

namespace whichway::theorem {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using StateVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct FrameInstance {
  Complex<Scalar> a;
  Complex<Scalar> b;
  Complex<Scalar> c1;  // real and positive unless built with complex_shared
  Complex<Scalar> c2;
  StateVector<Scalar> alpha;
  StateVector<Scalar> beta;
  StateVector<Scalar> gamma;

  Eigen::Index dim() const { return gamma.size(); }
  StateVector<Scalar> psi_a() const { return a * alpha + c1 * gamma; }
  StateVector<Scalar> psi_b() const { return b * beta - c2 * gamma; }

  /// |<alpha|beta>| required by orthogonality of psi_A and psi_B.
  Scalar predicted_overlap_modulus() const {
    return std::abs(c1 * c2) / (std::abs(a) * std::abs(b));
  }
};

/// Largest deviation from each structural invariant; all should be ~1e-15.
template <typename Scalar = double>
struct InvariantResiduals {
  Scalar gamma_alpha = 0;
  Scalar gamma_beta = 0;
  Scalar unit_vectors = 0;
  Scalar norm_a = 0;
  Scalar norm_b = 0;
  Scalar branch_overlap = 0;

  Scalar max() const {
    return std::max({gamma_alpha, gamma_beta, unit_vectors, norm_a, norm_b, branch_overlap});
  }
};

template <typename Scalar>
InvariantResiduals<Scalar> residuals(const FrameInstance<Scalar>& inst) {
  InvariantResiduals<Scalar> r;
  r.gamma_alpha = std::abs(inst.gamma.dot(inst.alpha));
  r.gamma_beta = std::abs(inst.gamma.dot(inst.beta));
  r.unit_vectors = std::max({std::abs(inst.alpha.norm() - Scalar(1)),
                             std::abs(inst.beta.norm() - Scalar(1)),
                             std::abs(inst.gamma.norm() - Scalar(1))});
  r.norm_a = std::abs(inst.psi_a().norm() - Scalar(1));
  r.norm_b = std::abs(inst.psi_b().norm() - Scalar(1));
  r.branch_overlap = std::abs(inst.psi_a().dot(inst.psi_b()));
  return r;
}

namespace detail {

template <typename Scalar, typename Rng>
StateVector<Scalar> gaussian_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  StateVector<Scalar> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Scalar re = normal(rng);
    const Scalar im = normal(rng);
    v(i) = Complex<Scalar>(re, im);
  }
  return v;
}

/// Random unit vector orthogonal to every column of `basis` (orthonormal).
/// Two Gram-Schmidt passes keep the residual overlap at rounding level.
template <typename Scalar, typename Rng>
StateVector<Scalar> random_unit_orthogonal_to(
    const Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>& basis, Eigen::Index dim,
    Rng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    StateVector<Scalar> v = gaussian_vector<Scalar>(dim, rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        v -= basis.col(j) * basis.col(j).dot(v);
      }
    }
    const Scalar n = v.norm();
    if (n > Scalar(1e-3)) return v / n;
  }
  throw pipeline_error("orthogonality_theorem", "could not draw an orthogonal direction");
}

}  // namespace detail

/// Builds the frame for given coefficients. c1, c2 may be complex; the
/// normalizations |a|^2 + |c1|^2 = 1 and |b|^2 + |c2|^2 = 1 are required.
template <typename Scalar, typename Rng>
FrameInstance<Scalar> make_instance(Eigen::Index dim, Complex<Scalar> a, Complex<Scalar> b,
                                    Complex<Scalar> c1, Complex<Scalar> c2, Rng& rng) {
  if (dim < 3) {
    throw validation_error("orthogonality_theorem", "dimension must be at least 3");
  }
  const Scalar tol = Scalar(1e-12);
  if (std::abs(std::norm(a) + std::norm(c1) - Scalar(1)) > tol ||
      std::abs(std::norm(b) + std::norm(c2) - Scalar(1)) > tol) {
    throw validation_error("orthogonality_theorem", "branch states must be normalized");
  }
  if (std::abs(a) == Scalar(0) || std::abs(b) == Scalar(0)) {
    throw validation_error("orthogonality_theorem", "a and b must be nonzero");
  }
  // <psi_A|psi_B> = conj(a) b <alpha|beta> - conj(c1) c2 = 0.
  const Complex<Scalar> rho = std::conj(c1) * c2 / (std::conj(a) * b);
  if (std::abs(rho) > Scalar(1)) {
    throw validation_error("orthogonality_theorem",
                           "unsatisfiable: |c1 c2| exceeds |a| |b|, so |<alpha|beta>| would exceed 1");
  }

  using Matrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  FrameInstance<Scalar> inst;
  inst.a = a;
  inst.b = b;
  inst.c1 = c1;
  inst.c2 = c2;
  inst.gamma = detail::random_unit_orthogonal_to<Scalar>(Matrix(dim, 0), dim, rng);
  inst.alpha = detail::random_unit_orthogonal_to<Scalar>(Matrix(inst.gamma), dim, rng);
  Matrix span(dim, 2);
  span.col(0) = inst.gamma;
  span.col(1) = inst.alpha;
  const StateVector<Scalar> perp = detail::random_unit_orthogonal_to<Scalar>(span, dim, rng);
  const Scalar perp_weight = std::sqrt(std::max(Scalar(0), Scalar(1) - std::norm(rho)));
  inst.beta = rho * inst.alpha + perp_weight * perp;
  return inst;
}

inline constexpr int kMaxResamples = 1000;

/// Deterministic random instance with real positive c1, c2.
template <typename Scalar = double>
FrameInstance<Scalar> sample_instance(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 3) {
    throw validation_error("orthogonality_theorem", "dimension must be at least 3");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  std::uniform_real_distribution<Scalar> phase(Scalar(0), Scalar(2 * EIGEN_PI));
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const Scalar c1 = unit(rng);
    const Scalar c2 = unit(rng);
    const Scalar ma = std::sqrt(Scalar(1) - c1 * c1);
    const Scalar mb = std::sqrt(Scalar(1) - c2 * c2);
    const Scalar pa = phase(rng);
    const Scalar pb = phase(rng);
    // Keep a margin so the constructed beta is well inside the unit ball.
    if (!(c1 > Scalar(1e-6) && c2 > Scalar(1e-6)) || c1 * c2 > ma * mb * Scalar(0.999)) continue;
    return make_instance<Scalar>(dim, std::polar(ma, pa), std::polar(mb, pb), Complex<Scalar>(c1),
                                 Complex<Scalar>(c2), rng);
  }
  throw pipeline_error("orthogonality_theorem", "no satisfiable coefficients after " +
                                                    std::to_string(kMaxResamples) + " draws");
}

/// <alpha|beta> computed from the stored vectors.
template <typename Scalar>
Complex<Scalar> surviving_overlap(const FrameInstance<Scalar>& inst) {
  return inst.alpha.dot(inst.beta);
}

template <typename Scalar = double>
struct TheoremReport {
  int trials = 0;
  Eigen::Index dim = 0;
  std::uint64_t seed = 0;
  Scalar min_overlap = std::numeric_limits<Scalar>::infinity();
  Scalar max_overlap = 0;
  Scalar worst_deviation = 0;
  Scalar worst_invariant_residual = 0;
  int violations = 0;
  bool passed = false;
};

inline constexpr double kOverlapFloor = 1e-12;
inline constexpr double kDeviationTolerance = 1e-9;

/// Per-trial seeds are derived from (seed, trial) so the reduction does not
/// depend on evaluation order.
template <typename Scalar = double>
TheoremReport<Scalar> check_theorem(int trials, Eigen::Index dim, std::uint64_t seed) {
  if (trials < 1) {
    throw validation_error("orthogonality_theorem", "trials must be at least 1");
  }
  TheoremReport<Scalar> report;
  report.trials = trials;
  report.dim = dim;
  report.seed = seed;
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::uint64_t trial_seed = 0;
    {
      std::uint32_t words[2];
      seq.generate(words, words + 2);
      trial_seed = (std::uint64_t(words[0]) << 32) | words[1];
    }
    FrameInstance<Scalar> inst;
    try {
      inst = sample_instance<Scalar>(dim, trial_seed);
    } catch (const Error& e) {
      throw Error(e.kind(), "orthogonality_theorem",
                  "trial " + std::to_string(trial) + ": " + e.what());
    }
    const Scalar modulus = std::abs(surviving_overlap(inst));
    const Scalar deviation = std::abs(modulus - inst.predicted_overlap_modulus());
    report.min_overlap = std::min(report.min_overlap, modulus);
    report.max_overlap = std::max(report.max_overlap, modulus);
    report.worst_deviation = std::max(report.worst_deviation, deviation);
    report.worst_invariant_residual = std::max(report.worst_invariant_residual, residuals(inst).max());
    if (!(modulus > Scalar(kOverlapFloor)) || !(deviation < Scalar(kDeviationTolerance))) {
      ++report.violations;
    }
  }
  report.passed = report.violations == 0;
  return report;
}

}  // namespace whichway::theorem
