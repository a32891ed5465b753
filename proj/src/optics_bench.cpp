#include "whichway/optics_bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "whichway/error.hpp"

namespace whichway {

namespace {

constexpr const char* kModule = "optics_bench";

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double median_gap(const std::vector<double>& positions) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < positions.size(); ++i) gaps.push_back(positions[i] - positions[i - 1]);
  return gaps.empty() ? 0.0 : median(std::move(gaps));
}

// Sample range [first, last] covered by the closed interval [lo, hi].
std::pair<std::size_t, std::size_t> covered_samples(const Grid& grid, double lo, double hi) {
  const double dy = grid.dy();
  const double first = std::max(0.0, std::ceil((lo - grid.y_min) / dy));
  const double last =
      std::min(static_cast<double>(grid.n_points) - 1.0, std::floor((hi - grid.y_min) / dy));
  if (last < first) return {1, 0};
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

}  // namespace

FringeMap find_dark_fringes(const Eigen::VectorXd& intensity, const Grid& grid, Interval window) {
  if (static_cast<std::size_t>(intensity.size()) != grid.n_points) {
    throw validation_error(kModule, "intensity profile does not match grid");
  }
  if (!(window.hi > window.lo)) throw validation_error(kModule, "empty fringe window");
  const double dy = grid.dy();
  FringeMap map;
  for (std::size_t i = 1; i + 1 < grid.n_points; ++i) {
    const double y = grid.y(i);
    if (!window.contains(y)) continue;
    const auto k = static_cast<Eigen::Index>(i);
    const double left = intensity(k - 1);
    const double mid = intensity(k);
    const double right = intensity(k + 1);
    if (!(mid < left && mid < right)) continue;
    const double curvature = left - 2.0 * mid + right;
    const double shift = 0.5 * (left - right) / curvature;
    map.minima_positions.push_back(y + shift * dy);
    map.minima_intensities.push_back(std::max(0.0, mid - 0.25 * (left - right) * shift));
  }
  if (map.minima_positions.size() < 2) {
    throw pipeline_error(kModule, "no interference: fewer than two intensity minima in window");
  }
  map.fringe_spacing = median_gap(map.minima_positions);
  return map;
}

FringeMap find_dark_fringes(const BranchedField& field, Interval window) {
  return find_dark_fringes(field.total().intensity(), field.grid(), window);
}

FringeMap central_fringes(const FringeMap& map, std::size_t count, double center) {
  if (count > map.minima_positions.size()) {
    throw pipeline_error(kModule, "requested " + std::to_string(count) + " fringes, found " +
                                      std::to_string(map.minima_positions.size()));
  }
  std::vector<std::size_t> order(map.minima_positions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(map.minima_positions[l] - center) < std::abs(map.minima_positions[r] - center);
  });
  order.resize(count);
  std::sort(order.begin(), order.end());
  FringeMap out;
  for (std::size_t i : order) {
    out.minima_positions.push_back(map.minima_positions[i]);
    out.minima_intensities.push_back(map.minima_intensities[i]);
  }
  out.fringe_spacing = out.minima_positions.size() >= 2 ? median_gap(out.minima_positions)
                                                         : map.fringe_spacing;
  return out;
}

void WireGrid::validate() const {
  if (!(edge_softness >= 0.0)) throw validation_error(kModule, "edge softness must be non-negative");
  if (positions.empty()) return;
  if (!(width > 0.0)) throw validation_error(kModule, "wire width must be positive");
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] - positions[i - 1] > width)) {
      throw validation_error(kModule, "wires must be increasing and non-overlapping");
    }
  }
}

double WireGrid::transmission(double y) const {
  double t = 1.0;
  for (double p : positions) {
    const double lo = p - 0.5 * width;
    const double hi = p + 0.5 * width;
    if (edge_softness == 0.0) {
      if (y >= lo && y <= hi) return 0.0;
      continue;
    }
    // Indicator of [lo, hi] blurred by a Gaussian of standard deviation edge_softness.
    const double s = edge_softness * std::numbers::sqrt2;
    const double absorbed = 0.5 * (std::erf((y - lo) / s) - std::erf((y - hi) / s));
    t *= 1.0 - absorbed;
  }
  return t;
}

WireGrid wires_on_fringes(const FringeMap& map, std::size_t count, double width_fraction,
                          double center, double edge_softness) {
  if (!(width_fraction > 0.0 && width_fraction < 0.5)) {
    throw validation_error(kModule, "wire width fraction must lie in (0, 0.5)");
  }
  const FringeMap central = central_fringes(map, count, center);
  WireGrid wires{central.minima_positions, width_fraction * map.fringe_spacing, edge_softness};
  wires.validate();
  return wires;
}

MaskResult apply_wires(const BranchedField& field, const WireGrid& wires) {
  wires.validate();
  const Grid& grid = field.grid();
  const double dy = grid.dy();
  MaskResult out{field, 0.0, 0.0, 0.0};
  if (wires.positions.empty()) return out;
  // Soft edges reach a few blur widths past the nominal wire boundary.
  const double reach = 0.5 * wires.width + 8.0 * wires.edge_softness;
  std::vector<bool> touched(grid.n_points, false);
  for (double p : wires.positions) {
    const auto [first, last] = covered_samples(grid, p - reach, p + reach);
    for (std::size_t i = first; i <= last && first <= last; ++i) touched[i] = true;
  }
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    if (!touched[i]) continue;
    const double t = wires.transmission(grid.y(i));
    if (t == 1.0) continue;
    const auto k = static_cast<Eigen::Index>(i);
    const double absorbed = 1.0 - t * t;
    Complex& a = out.field.a.values(k);
    Complex& b = out.field.b.values(k);
    out.blocked_a += absorbed * std::norm(a) * dy;
    out.blocked_b += absorbed * std::norm(b) * dy;
    out.blocked_total += absorbed * std::norm(a + b) * dy;
    a *= t;
    b *= t;
  }
  if (out.field.origin) out.field.origin->masked = true;
  return out;
}

LensSpec LensSpec::imaging(double focal_length, double aperture_halfwidth, double object_distance) {
  if (!(focal_length > 0.0) || !(object_distance > focal_length)) {
    throw validation_error(kModule, "a real image needs object distance > focal length > 0");
  }
  LensSpec lens;
  lens.focal_length = focal_length;
  lens.aperture_halfwidth = aperture_halfwidth;
  lens.object_distance = object_distance;
  lens.image_distance = 1.0 / (1.0 / focal_length - 1.0 / object_distance);
  lens.validate();
  return lens;
}

void LensSpec::validate() const {
  if (!(focal_length > 0.0) || !(object_distance > 0.0) || !(image_distance > 0.0)) {
    throw validation_error(kModule, "lens distances must be positive");
  }
  if (!(aperture_halfwidth >= 0.0)) throw validation_error(kModule, "aperture must be non-negative");
  if (!(edge_softness >= 0.0)) throw validation_error(kModule, "aperture edge softness must be non-negative");
  const double mismatch = std::abs(1.0 / object_distance + 1.0 / image_distance - 1.0 / focal_length);
  if (mismatch > 1e-12 / focal_length) {
    throw validation_error(kModule, "lens distances violate 1/o + 1/i = 1/f");
  }
}

double LensSpec::transmission(double y) const {
  if (!(aperture_halfwidth > 0.0)) return 0.0;
  if (edge_softness == 0.0) return std::abs(y) <= aperture_halfwidth ? 1.0 : 0.0;
  const double s = edge_softness * std::numbers::sqrt2;
  return 0.5 * (std::erf((y + aperture_halfwidth) / s) - std::erf((y - aperture_halfwidth) / s));
}

LensResult image_through_lens(const BranchedField& field, const LensSpec& lens, double mass,
                              double hbar) {
  lens.validate();
  if (std::abs(field.time() - lens.object_distance) > 1e-9 * std::max(1.0, lens.object_distance)) {
    throw validation_error(kModule, "field has not drifted to the lens plane");
  }
  const Grid& grid = field.grid();
  const double dy = grid.dy();
  LensResult out{field, 0.0, 0.0, 0.0};
  out.field.origin.reset();
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double y = grid.y(i);
    const auto k = static_cast<Eigen::Index>(i);
    Complex& va = out.field.a.values(k);
    Complex& vb = out.field.b.values(k);
    const double t = lens.transmission(y);
    if (t < 1.0) {
      const double absorbed = (1.0 - t * t) * dy;
      out.aperture_loss_a += absorbed * std::norm(va);
      out.aperture_loss_b += absorbed * std::norm(vb);
      out.aperture_loss_total += absorbed * std::norm(va + vb);
    }
    const Complex kick = std::polar(t, -mass * y * y / (2.0 * hbar * lens.focal_length));
    va *= kick;
    vb *= kick;
  }
  out.field = propagate_spectral(out.field, lens.image_distance, mass, hbar);
  return out;
}

DetectorReport detect(const BranchedField& field, double split_point, const FluxLedger& ledger,
                      Side da_side) {
  const Grid& grid = field.grid();
  const double dy = grid.dy();
  double below_a = 0, above_a = 0, below_b = 0, above_b = 0, below_t = 0, above_t = 0;
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double y = grid.y(i);
    const auto k = static_cast<Eigen::Index>(i);
    const double ia = std::norm(field.a.values(k)) * dy;
    const double ib = std::norm(field.b.values(k)) * dy;
    const double it = std::norm(field.a.values(k) + field.b.values(k)) * dy;
    const double w_below = y < split_point ? 1.0 : (y == split_point ? 0.5 : 0.0);
    below_a += w_below * ia;
    above_a += (1.0 - w_below) * ia;
    below_b += w_below * ib;
    above_b += (1.0 - w_below) * ib;
    below_t += w_below * it;
    above_t += (1.0 - w_below) * it;
  }
  const bool da_below = da_side == Side::below;
  DetectorReport r;
  r.p_da_from_a = da_below ? below_a : above_a;
  r.p_db_from_a = da_below ? above_a : below_a;
  r.p_da_from_b = da_below ? below_b : above_b;
  r.p_db_from_b = da_below ? above_b : below_b;
  r.p_da_total = da_below ? below_t : above_t;
  r.p_db_total = da_below ? above_t : below_t;
  r.blocked_flux = ledger.blocked_total;
  r.leaked_flux = ledger.leaked_total;
  r.ledger = ledger;
  return r;
}

DetectorReport detect_far_field(const BranchedField& field, const FluxLedger& ledger,
                                Side da_side) {
  const Spectrum sa = spectrum_of(field.a);
  const Spectrum sb = spectrum_of(field.b);
  const auto n = sa.values.size();
  const double scale = field.grid().dy() / static_cast<double>(n);
  const double k_nyquist = std::abs(sa.wavenumbers(n / 2));
  double below_a = 0, above_a = 0, below_b = 0, above_b = 0, below_t = 0, above_t = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k = sa.wavenumbers(j);
    const double ia = std::norm(sa.values(j)) * scale;
    const double ib = std::norm(sb.values(j)) * scale;
    const double it = std::norm(sa.values(j) + sb.values(j)) * scale;
    const bool boundary = k == 0.0 || std::abs(k) == k_nyquist;
    const double w_below = boundary ? 0.5 : (k < 0.0 ? 1.0 : 0.0);
    below_a += w_below * ia;
    above_a += (1.0 - w_below) * ia;
    below_b += w_below * ib;
    above_b += (1.0 - w_below) * ib;
    below_t += w_below * it;
    above_t += (1.0 - w_below) * it;
  }
  const bool da_below = da_side == Side::below;
  DetectorReport r;
  r.p_da_from_a = da_below ? below_a : above_a;
  r.p_db_from_a = da_below ? above_a : below_a;
  r.p_da_from_b = da_below ? below_b : above_b;
  r.p_db_from_b = da_below ? above_b : below_b;
  r.p_da_total = da_below ? below_t : above_t;
  r.p_db_total = da_below ? above_t : below_t;
  r.blocked_flux = ledger.blocked_total;
  r.leaked_flux = ledger.leaked_total;
  r.ledger = ledger;
  return r;
}

TwoModeFit fit_two_modes(const WaveField& field, const WaveField& mode_plus,
                         const WaveField& mode_minus) {
  Eigen::Matrix2cd gram;
  gram(0, 0) = mode_plus.inner(mode_plus);
  gram(0, 1) = mode_plus.inner(mode_minus);
  gram(1, 0) = mode_minus.inner(mode_plus);
  gram(1, 1) = mode_minus.inner(mode_minus);
  const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(gram);
  const auto sv = svd.singularValues();
  const double condition = sv(1) > 0.0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxGramCondition)) {
    throw pipeline_error(kModule, "mode Gram matrix is singular to working precision (modes indistinguishable)");
  }
  const Eigen::Vector2cd projections(mode_plus.inner(field), mode_minus.inner(field));
  TwoModeFit fit;
  fit.coefficients = gram.partialPivLu().solve(projections);
  fit.gram_condition = condition;
  const Eigen::VectorXcd residual =
      field.values - fit.coefficients(0) * mode_plus.values - fit.coefficients(1) * mode_minus.values;
  const double scale = field.values.norm();
  fit.residual = scale > 0.0 ? residual.norm() / scale : 0.0;
  return fit;
}

Eigen::Matrix2cd cancel_shared_sinh(const Eigen::Matrix2cd& raw) {
  // In the mode basis, cosh content is the symmetric combination and sinh
  // content the antisymmetric one: c = h (1, 1) + s (1, -1).
  Complex sinh_a = 0.5 * (raw(0, 0) - raw(0, 1));
  Complex sinh_b = 0.5 * (raw(1, 0) - raw(1, 1));
  const Complex cosh_a = 0.5 * (raw(0, 0) + raw(0, 1));
  const Complex cosh_b = 0.5 * (raw(1, 0) + raw(1, 1));

  // Cancel along the larger sinh; the amount is the opposing projection of
  // the smaller one, which never exceeds either magnitude.
  Complex& big = std::abs(sinh_a) >= std::abs(sinh_b) ? sinh_a : sinh_b;
  Complex& small = std::abs(sinh_a) >= std::abs(sinh_b) ? sinh_b : sinh_a;
  if (std::abs(big) > 0.0) {
    const Complex direction = big / std::abs(big);
    const double opposing = std::max(0.0, -(std::conj(direction) * small).real());
    big -= opposing * direction;
    small += opposing * direction;
  }

  Eigen::Matrix2cd out;
  out << cosh_a + sinh_a, cosh_a - sinh_a, cosh_b + sinh_b, cosh_b - sinh_b;
  return out;
}

ModeContributions mode_contributions(const BranchedField& field) {
  if (!field.origin) {
    throw validation_error(kModule, "mode analysis needs a pre-lens field with known slit geometry");
  }
  const SlitConfig& cfg = field.origin->slit;
  const WaveField plus = analytic_mode(cfg, field.grid(), field.time(), cfg.y0);
  const WaveField minus = analytic_mode(cfg, field.grid(), field.time(), -cfg.y0);
  const TwoModeFit fit_a = fit_two_modes(field.a, plus, minus);
  const TwoModeFit fit_b = fit_two_modes(field.b, plus, minus);
  ModeContributions mc;
  mc.raw.row(0) = fit_a.coefficients.transpose();
  mc.raw.row(1) = fit_b.coefficients.transpose();
  mc.surviving = cancel_shared_sinh(mc.raw);
  mc.residual = Eigen::Vector2d(fit_a.residual, fit_b.residual);
  mc.gram_condition = std::max(fit_a.gram_condition, fit_b.gram_condition);
  mc.mode_norm_plus = plus.norm();
  mc.mode_norm_minus = minus.norm();
  return mc;
}

void write_intensity_csv(std::ostream& out, const BranchedField& field, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << "y,intensity,intensity_branch_a,intensity_branch_b\n";
  char line[128];
  const Grid& grid = field.grid();
  for (std::size_t i = 0; i < grid.n_points; i += stride) {
    const auto k = static_cast<Eigen::Index>(i);
    const Complex a = field.a.values(k);
    const Complex b = field.b.values(k);
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", grid.y(i), std::norm(a + b),
                  std::norm(a), std::norm(b));
    out << line;
  }
}

}  // namespace whichway
