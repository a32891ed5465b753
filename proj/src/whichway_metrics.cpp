#include "whichway/whichway_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "whichway/error.hpp"

namespace whichway {

namespace {

constexpr const char* kModule = "whichway_metrics";

struct Extremum {
  double position;
  double value;
};

// Parabolic vertex through three equally spaced samples.
Extremum refine(double y, double dy, double left, double mid, double right) {
  const double curvature = left - 2.0 * mid + right;
  if (curvature == 0.0) return {y, mid};
  const double shift = 0.5 * (left - right) / curvature;
  return {y + shift * dy, mid - 0.25 * (left - right) * shift};
}

std::array<double, 2> renormalized(const std::array<double, 2>& p) {
  const double sum = p[0] + p[1];
  if (!(sum > 0.0)) {
    throw pipeline_error(kModule, "a conditional has zero surviving flux");
  }
  return {p[0] / sum, p[1] / sum};
}

}  // namespace

double visibility(const Eigen::VectorXd& intensity, const Grid& grid, Interval window) {
  if (static_cast<std::size_t>(intensity.size()) != grid.n_points) {
    throw validation_error(kModule, "intensity profile does not match grid");
  }
  const double dy = grid.dy();
  std::vector<Extremum> minima;
  std::vector<Extremum> maxima;
  for (std::size_t i = 1; i + 1 < grid.n_points; ++i) {
    const double y = grid.y(i);
    if (!window.contains(y)) continue;
    const auto k = static_cast<Eigen::Index>(i);
    const double l = intensity(k - 1), m = intensity(k), r = intensity(k + 1);
    if (m < l && m < r) minima.push_back(refine(y, dy, l, m, r));
    if (m > l && m > r) maxima.push_back(refine(y, dy, l, m, r));
  }
  if (maxima.size() < 2 || minima.empty()) {
    throw pipeline_error(kModule, "visibility undefined: no fringes in window");
  }

  const double center = window.center();
  std::sort(minima.begin(), minima.end(), [center](const Extremum& x, const Extremum& y) {
    return std::abs(x.position - center) < std::abs(y.position - center);
  });
  double sum = 0.0;
  int used = 0;
  for (const Extremum& minimum : minima) {
    if (used == kVisibilityFringes) break;
    const Extremum* left = nullptr;
    const Extremum* right = nullptr;
    for (const Extremum& peak : maxima) {
      if (peak.position < minimum.position && (!left || peak.position > left->position)) left = &peak;
      if (peak.position > minimum.position && (!right || peak.position < right->position)) right = &peak;
    }
    if (!left || !right) continue;
    const double i_max = 0.5 * (left->value + right->value);
    const double i_min = std::max(0.0, minimum.value);
    sum += (i_max - i_min) / (i_max + i_min);
    ++used;
  }
  if (used == 0) {
    throw pipeline_error(kModule, "visibility undefined: no minimum is bracketed by maxima");
  }
  return sum / used;
}

void ConditionalStats::validate() const {
  for (const auto& p : {given_a, given_b}) {
    if (p[0] < 0.0 || p[1] < 0.0 || p[0] + p[1] > 1.0 + 1e-9) {
      throw validation_error(kModule, "conditional probabilities must be non-negative and sum to at most 1");
    }
  }
  if (!(prior_a >= 0.0 && prior_a <= 1.0)) {
    throw validation_error(kModule, "prior must lie in [0, 1]");
  }
}

double distinguishability(const ConditionalStats& stats, Renormalization mode) {
  stats.validate();
  auto pa = stats.given_a;
  auto pb = stats.given_b;
  if (mode == Renormalization::surviving) {
    pa = renormalized(pa);
    pb = renormalized(pb);
  }
  return 0.5 * (std::abs(pa[0] - pb[0]) + std::abs(pa[1] - pb[1]));
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double mutual_information(const ConditionalStats& stats) {
  stats.validate();
  if (!(stats.prior_a > 0.0 && stats.prior_a < 1.0)) {
    throw validation_error(kModule, "mutual information needs a prior strictly inside (0, 1)");
  }
  const auto pa = renormalized(stats.given_a);
  const auto pb = renormalized(stats.given_b);
  const double wa = stats.prior_a;
  const double wb = 1.0 - stats.prior_a;
  double info = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double marginal = wa * pa[d] + wb * pb[d];
    if (pa[d] > 0.0) info += wa * pa[d] * std::log2(pa[d] / marginal);
    if (pb[d] > 0.0) info += wb * pb[d] * std::log2(pb[d] / marginal);
  }
  return std::max(0.0, info);
}

double duality_budget(double v, double d) { return v * v + d * d; }

ConditionalStats stats_from_detectors(const DetectorReport& report) {
  const FluxLedger& l = report.ledger;
  if (!(l.norm_in_a > 0.0) || !(l.norm_in_b > 0.0)) {
    throw pipeline_error(kModule, "both branches need input flux for conditional statistics");
  }
  ConditionalStats stats;
  stats.given_a = {report.p_da_from_a / l.norm_in_a, report.p_db_from_a / l.norm_in_a};
  stats.given_b = {report.p_da_from_b / l.norm_in_b, report.p_db_from_b / l.norm_in_b};
  stats.prior_a = l.norm_in_a / (l.norm_in_a + l.norm_in_b);
  return stats;
}

ConditionalStats stats_from_modes(const ModeContributions& modes) {
  auto weights = [&](Eigen::Index row) {
    return std::array<double, 2>{std::norm(modes.surviving(row, 0)) * modes.mode_norm_plus,
                                 std::norm(modes.surviving(row, 1)) * modes.mode_norm_minus};
  };
  const auto wa = weights(0);
  const auto wb = weights(1);
  const double na = wa[0] + wa[1];
  const double nb = wb[0] + wb[1];
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw pipeline_error(kModule, "a branch has no surviving mode content");
  }
  ConditionalStats stats;
  stats.given_a = {wa[0] / na, wa[1] / na};
  stats.given_b = {wb[0] / nb, wb[1] / nb};
  const double raw_a = modes.raw.row(0).squaredNorm();
  const double raw_b = modes.raw.row(1).squaredNorm();
  stats.prior_a = raw_a / (raw_a + raw_b);
  return stats;
}

}  // namespace whichway
