#pragma once

// Interference and which-way measures computed from branch-resolved data.

#include <array>

#include <Eigen/Dense>

#include "whichway/optics_bench.hpp"
#include "whichway/wavepacket.hpp"

namespace whichway {

/// Fringe contrast (I_max - I_min) / (I_max + I_min), averaged over up to
/// five minima closest to the window centre; each minimum is paired with the
/// mean of its two neighbouring maxima. Throws if the window holds fewer than
/// two maxima or no bracketed minimum.
double visibility(const Eigen::VectorXd& intensity, const Grid& grid, Interval window);

inline constexpr int kVisibilityFringes = 5;

/// Click probabilities (D_A, D_B) conditioned on each slit, plus the prior
/// on slit A. Conditionals may sum to less than one: the deficit is flux
/// blocked or leaked before the detectors.
struct ConditionalStats {
  std::array<double, 2> given_a{0.0, 0.0};
  std::array<double, 2> given_b{0.0, 0.0};
  double prior_a = 0.5;

  void validate() const;
};

enum class Renormalization {
  surviving,  // divide each conditional by its own sum (detected particles only)
  none,
};

/// Half the L1 distance between the two conditionals; 0 means the detector
/// record says nothing about the slit, 1 means perfect correspondence.
double distinguishability(const ConditionalStats& stats,
                          Renormalization mode = Renormalization::surviving);

/// I(slit; detector) in bits from the prior and the renormalized conditionals.
double mutual_information(const ConditionalStats& stats);

/// v^2 + d^2.
double duality_budget(double v, double d);

double binary_entropy(double p);

/// Conditionals from per-branch detector integrals; the prior is the branch
/// input weight.
ConditionalStats stats_from_detectors(const DetectorReport& report);

/// Conditionals over the two detector-bound modes, from the surviving
/// (post-cancellation) coefficients.
ConditionalStats stats_from_modes(const ModeContributions& modes);

}  // namespace whichway
