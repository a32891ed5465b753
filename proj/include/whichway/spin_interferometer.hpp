#pragma once

// Two-level "two-slit" interferometer: a spin-1/2 precessing in a field
// along y, with the two initial basis states playing the role of the slits.
// hbar = 1 throughout.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "whichway/error.hpp"

namespace whichway::spin {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Amplitudes over the fixed basis {up, down}.
template <typename Scalar>
using SpinState = Eigen::Matrix<Complex<Scalar>, 2, 1>;

template <typename Scalar>
using SpinOperator = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar = double>
SpinState<Scalar> up() {
  return SpinState<Scalar>(Complex<Scalar>(1), Complex<Scalar>(0));
}

template <typename Scalar = double>
SpinState<Scalar> down() {
  return SpinState<Scalar>(Complex<Scalar>(0), Complex<Scalar>(1));
}

template <typename Scalar = double>
SpinOperator<Scalar> pauli_y() {
  SpinOperator<Scalar> s;
  s << Complex<Scalar>(0), Complex<Scalar>(0, -1), Complex<Scalar>(0, 1), Complex<Scalar>(0);
  return s;
}

/// Precession under H = B * S_y.
template <typename Scalar = double>
class SpinEvolver {
 public:
  explicit SpinEvolver(Scalar field_strength = Scalar(1)) : field_strength_(field_strength) {
    if (!(field_strength > Scalar(0)) || !std::isfinite(field_strength)) {
      throw validation_error("spin_interferometer", "field strength must be positive and finite");
    }
  }

  Scalar field_strength() const { return field_strength_; }

  /// Quarter-period tau = pi / (2B); U(tau) = (1 + i sigma_y) / sqrt(2).
  Scalar tau() const { return Scalar(EIGEN_PI) / (Scalar(2) * field_strength_); }

  /// U(t) = cos(Bt/2) I + i sin(Bt/2) sigma_y.
  SpinOperator<Scalar> propagator(Scalar duration) const {
    const Scalar half_angle = field_strength_ * duration / Scalar(2);
    const Scalar c = std::cos(half_angle);
    const Scalar s = std::sin(half_angle);
    // i * sigma_y is the real rotation generator [[0, 1], [-1, 0]].
    SpinOperator<Scalar> u;
    u << Complex<Scalar>(c), Complex<Scalar>(s), Complex<Scalar>(-s), Complex<Scalar>(c);
    return u;
  }

 private:
  Scalar field_strength_;
};

template <typename Scalar>
SpinState<Scalar> evolve(const SpinState<Scalar>& state, const SpinEvolver<Scalar>& evolver,
                         Scalar duration) {
  if (!(duration >= Scalar(0))) {
    throw validation_error("spin_interferometer", "duration must be non-negative");
  }
  return evolver.propagator(duration) * state;
}

/// The two unnormalized contributions that started as |up> and |down>.
/// Their sum is the physical state.
template <typename Scalar = double>
struct BranchedSpinState {
  SpinState<Scalar> from_up;
  SpinState<Scalar> from_down;

  SpinState<Scalar> total() const { return from_up + from_down; }
};

template <typename Scalar>
BranchedSpinState<Scalar> evolve(const BranchedSpinState<Scalar>& state,
                                 const SpinEvolver<Scalar>& evolver, Scalar duration) {
  return {evolve(state.from_up, evolver, duration), evolve(state.from_down, evolver, duration)};
}

/// (|up> + |down>)/sqrt(2), split into its two branches.
template <typename Scalar = double>
BranchedSpinState<Scalar> initial_branches() {
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  return {up<Scalar>() * r, down<Scalar>() * r};
}

/// Both branches evolved for one quarter period: the "interference region".
template <typename Scalar>
BranchedSpinState<Scalar> make_interference_state(const SpinEvolver<Scalar>& evolver) {
  return evolve(initial_branches<Scalar>(), evolver, evolver.tau());
}

/// Drops the down component of each branch (the dark port). Not unitary.
template <typename Scalar>
BranchedSpinState<Scalar> project_dark_port(const BranchedSpinState<Scalar>& state) {
  BranchedSpinState<Scalar> out = state;
  out.from_up(1) = Complex<Scalar>(0);
  out.from_down(1) = Complex<Scalar>(0);
  return out;
}

template <typename Scalar>
SpinOperator<Scalar> density_matrix(const SpinState<Scalar>& state) {
  return state * state.adjoint();
}

/// Trace distance (1/2) ||rho - sigma||_1 between two density matrices.
template <typename Scalar>
Scalar trace_distance(const SpinOperator<Scalar>& rho, const SpinOperator<Scalar>& sigma) {
  const SpinOperator<Scalar> diff = rho - sigma;
  Eigen::SelfAdjointEigenSolver<SpinOperator<Scalar>> solver(diff, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum() / Scalar(2);
}

/// How well the two branches can be told apart once normalized:
/// 0 means the final state carries no record of the initial basis state.
template <typename Scalar>
Scalar which_initial_state_info(const BranchedSpinState<Scalar>& state) {
  const Scalar n_up = state.from_up.norm();
  const Scalar n_down = state.from_down.norm();
  if (n_up == Scalar(0) && n_down == Scalar(0)) {
    throw pipeline_error("spin_interferometer", "both branches fully absorbed");
  }
  // A vanished branch is trivially distinguishable from a surviving one.
  if (n_up == Scalar(0) || n_down == Scalar(0)) return Scalar(1);
  const SpinState<Scalar> a = state.from_up / n_up;
  const SpinState<Scalar> b = state.from_down / n_down;
  return trace_distance(density_matrix(a), density_matrix(b));
}

/// Probability of each z-basis click (up, down) for one unnormalized branch.
template <typename Scalar>
std::pair<Scalar, Scalar> click_probabilities(const SpinState<Scalar>& branch) {
  return {std::norm(branch(0)), std::norm(branch(1))};
}

/// Output of the full two-quarter-period run.
template <typename Scalar = double>
struct SpinPipeline {
  BranchedSpinState<Scalar> interference;  // after tau
  BranchedSpinState<Scalar> projected;     // dark port removed
  BranchedSpinState<Scalar> final;         // further tau
  BranchedSpinState<Scalar> unprojected;   // 2 tau with no projection
};

template <typename Scalar>
SpinPipeline<Scalar> run_pipeline(const SpinEvolver<Scalar>& evolver) {
  SpinPipeline<Scalar> p;
  p.interference = make_interference_state(evolver);
  p.projected = project_dark_port(p.interference);
  p.final = evolve(p.projected, evolver, evolver.tau());
  p.unprojected = evolve(p.interference, evolver, evolver.tau());
  return p;
}

}  // namespace whichway::spin
