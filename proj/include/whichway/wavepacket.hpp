#pragma once

// One-dimensional Gaussian two-slit state, its closed-form free evolution,
// and a spectral (FFT) free propagator used both as workhorse and as an
// independent check on the closed form.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace whichway {

using Complex = std::complex<double>;

/// Uniform periodic grid; sample i sits at y_min + i * dy.
struct Grid {
  std::size_t n_points = 65536;
  double y_min = -4096.0;
  double y_max = 4096.0;

  double dy() const { return (y_max - y_min) / static_cast<double>(n_points); }
  double y(std::size_t i) const { return y_min + static_cast<double>(i) * dy(); }
  Eigen::VectorXd coordinates() const;
  /// Nearest sample index, clamped to the grid.
  std::size_t index_of(double y) const;

  void validate() const;
  bool operator==(const Grid&) const = default;
};

struct SlitConfig {
  double epsilon = 0.5;  // packet width
  double y0 = 5.0;       // half slit separation; slit A at +y0, slit B at -y0
  Complex amp_a{1.0 / std::numbers::sqrt2, 0.0};
  Complex amp_b{1.0 / std::numbers::sqrt2, 0.0};
  double mass = 1.0;
  double hbar = 1.0;

  /// |<A|B>| of the unit-normalized t = 0 packets.
  double initial_overlap() const;
  void validate() const;
  bool operator==(const SlitConfig&) const = default;
};

/// Omega(t) = epsilon^2 + 2 i hbar t / m.
Complex omega(const SlitConfig& cfg, double t);
/// C(t) = (pi/2)^(-1/4) (epsilon + 2 i hbar t / (m epsilon))^(-1/2), principal root.
Complex packet_prefactor(const SlitConfig& cfg, double t);

inline constexpr double kBoundaryTolerance = 1e-10;
inline constexpr std::size_t kBoundaryGuardSamples = 8;

struct WaveField {
  Grid grid;
  Eigen::VectorXcd values;
  double time = 0.0;

  /// Integral of |psi|^2 dy (rectangle rule; exact for band-limited periodic data).
  double norm() const;
  Eigen::VectorXd intensity() const { return values.cwiseAbs2(); }
  /// Largest |psi| among the outermost guard samples at each edge.
  double edge_magnitude() const;
  /// <this|other> with the grid measure.
  Complex inner(const WaveField& other) const;
};

/// Which closed form, if any, describes a BranchedField.
struct AnalyticOrigin {
  SlitConfig slit;
  bool masked = false;  // wires applied; the closed form no longer matches
};

/// Slit A and slit B contributions, sharing grid and time; their sum is
/// the physical field.
struct BranchedField {
  WaveField a;
  WaveField b;
  std::optional<AnalyticOrigin> origin;

  const Grid& grid() const { return a.grid; }
  double time() const { return a.time; }
  WaveField total() const;
};

/// Samples the t = 0 superposition of two Gaussians. Throws if either packet
/// is not negligible at the grid edges.
BranchedField initial_state(const SlitConfig& cfg, const Grid& grid);

/// The closed form a C(t) exp(-(y -/+ y0)^2 / Omega(t)) sampled at time t.
/// Only defined from an unmasked t = 0 initial state.
BranchedField propagate_analytic(const BranchedField& field, double t);

/// Unit-amplitude Gaussian mode C(t) exp(-(y - center)^2 / Omega(t)).
WaveField analytic_mode(const SlitConfig& cfg, const Grid& grid, double t, double center);

/// amplitude (pi/2)^(-1/4) eps^(-1/2) exp(-(y - center)^2 / eps^2 + i k y).
WaveField gaussian_packet(const Grid& grid, double center, double epsilon, double wavenumber,
                          Complex amplitude);

/// Unnormalized FFT of the samples with the matching angular wavenumbers.
/// |psi|^2 dy summed over the grid equals (dy / n) * sum |spectrum|^2.
struct Spectrum {
  Eigen::VectorXcd values;
  Eigen::VectorXd wavenumbers;
};
Spectrum spectrum_of(const WaveField& field);

/// Exact free evolution on the periodic grid by dt, via FFT.
/// Throws if the result touches the grid edges (wraparound).
WaveField propagate_spectral(const WaveField& field, double dt, double mass, double hbar);
BranchedField propagate_spectral(const BranchedField& field, double dt, double mass, double hbar);

/// Splits each analytic branch into its cosh and sinh parts about y = 0:
///   branch_a = cosh_a + sinh_a,  branch_b = cosh_b - sinh_b.
struct CoshSinhParts {
  WaveField cosh_a;
  WaveField sinh_a;
  WaveField cosh_b;
  WaveField sinh_b;
};

CoshSinhParts cosh_sinh_decompose(const BranchedField& field);

/// L2 distance between two fields on the same grid, relative to |reference|.
double relative_l2(const WaveField& field, const WaveField& reference);

/// CSV with header `y,re,im,intensity`, 17 significant digits.
void write_wavefield_csv(std::ostream& out, const WaveField& field, std::size_t stride = 1);
/// Reads back a full-stride CSV written by write_wavefield_csv.
WaveField read_wavefield_csv(std::istream& in, double time = 0.0);

}  // namespace whichway
