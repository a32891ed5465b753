#include "whichway/wavepacket.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "whichway/error.hpp"

namespace whichway {

namespace {

constexpr const char* kModule = "wavepacket_engine";

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_grid(const WaveField& x, const WaveField& y) {
  if (!(x.grid == y.grid) || x.values.size() != y.values.size()) {
    throw validation_error(kModule, "fields live on different grids");
  }
}

void check_boundary(const WaveField& field, const char* stage) {
  const double edge = field.edge_magnitude();
  if (!(edge < kBoundaryTolerance)) {
    std::ostringstream msg;
    msg << stage << ": |psi| = " << edge << " at the grid edge exceeds " << kBoundaryTolerance
        << " (grid too small or wraparound)";
    throw pipeline_error(kModule, msg.str());
  }
}

// exp(p) cosh(s) and exp(p) sinh(s), factoring out the growing exponential
// so that neither piece overflows when |s| is large.
std::pair<Complex, Complex> scaled_cosh_sinh(Complex p, Complex s) {
  if (s.real() >= 0.0) {
    const Complex lead = std::exp(p + s) / 2.0;
    const Complex tail = std::exp(-2.0 * s);
    return {lead * (1.0 + tail), lead * (1.0 - tail)};
  }
  const Complex lead = std::exp(p - s) / 2.0;
  const Complex tail = std::exp(2.0 * s);
  return {lead * (1.0 + tail), -lead * (1.0 - tail)};
}

}  // namespace

Eigen::VectorXd Grid::coordinates() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(n_points));
  for (std::size_t i = 0; i < n_points; ++i) y(static_cast<Eigen::Index>(i)) = this->y(i);
  return y;
}

std::size_t Grid::index_of(double value) const {
  const double raw = std::round((value - y_min) / dy());
  if (raw <= 0.0) return 0;
  if (raw >= static_cast<double>(n_points - 1)) return n_points - 1;
  return static_cast<std::size_t>(raw);
}

void Grid::validate() const {
  if (!is_power_of_two(n_points) || n_points < 16) {
    throw validation_error(kModule, "grid size must be a power of two >= 16");
  }
  if (!(y_max > y_min) || !std::isfinite(y_min) || !std::isfinite(y_max)) {
    throw validation_error(kModule, "grid bounds must satisfy y_min < y_max");
  }
}

double SlitConfig::initial_overlap() const { return std::exp(-2.0 * y0 * y0 / (epsilon * epsilon)); }

void SlitConfig::validate() const {
  if (!(epsilon > 0.0) || !(y0 > 0.0) || !(mass > 0.0) || !(hbar > 0.0)) {
    throw validation_error(kModule, "epsilon, y0, mass and hbar must be positive");
  }
  if (!(epsilon < y0)) {
    throw validation_error(kModule, "packet width must be smaller than the half separation");
  }
  if (!(initial_overlap() < 1e-10)) {
    throw validation_error(kModule, "initial packets overlap (exp(-2 y0^2/eps^2) >= 1e-10)");
  }
  if (std::abs(std::norm(amp_a) + std::norm(amp_b) - 1.0) > 1e-12) {
    throw validation_error(kModule, "|amp_a|^2 + |amp_b|^2 must equal 1");
  }
}

Complex omega(const SlitConfig& cfg, double t) {
  return {cfg.epsilon * cfg.epsilon, 2.0 * cfg.hbar * t / cfg.mass};
}

Complex packet_prefactor(const SlitConfig& cfg, double t) {
  const Complex width{cfg.epsilon, 2.0 * cfg.hbar * t / (cfg.mass * cfg.epsilon)};
  return std::pow(std::numbers::pi / 2.0, -0.25) / std::sqrt(width);
}

double WaveField::norm() const { return values.squaredNorm() * grid.dy(); }

double WaveField::edge_magnitude() const {
  const auto n = static_cast<std::size_t>(values.size());
  const std::size_t guard = std::min(kBoundaryGuardSamples, n / 2);
  double edge = 0.0;
  for (std::size_t i = 0; i < guard; ++i) {
    edge = std::max(edge, std::abs(values(static_cast<Eigen::Index>(i))));
    edge = std::max(edge, std::abs(values(static_cast<Eigen::Index>(n - 1 - i))));
  }
  return edge;
}

Complex WaveField::inner(const WaveField& other) const {
  require_same_grid(*this, other);
  return values.dot(other.values) * grid.dy();
}

WaveField BranchedField::total() const {
  return {a.grid, a.values + b.values, a.time};
}

WaveField analytic_mode(const SlitConfig& cfg, const Grid& grid, double t, double center) {
  const Complex c = packet_prefactor(cfg, t);
  const Complex w = omega(cfg, t);
  WaveField mode{grid, Eigen::VectorXcd(static_cast<Eigen::Index>(grid.n_points)), t};
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double d = grid.y(i) - center;
    mode.values(static_cast<Eigen::Index>(i)) = c * std::exp(-d * d / w);
  }
  return mode;
}

BranchedField initial_state(const SlitConfig& cfg, const Grid& grid) {
  cfg.validate();
  grid.validate();
  BranchedField field;
  field.a = analytic_mode(cfg, grid, 0.0, cfg.y0);
  field.b = analytic_mode(cfg, grid, 0.0, -cfg.y0);
  field.a.values *= cfg.amp_a;
  field.b.values *= cfg.amp_b;
  field.origin = AnalyticOrigin{cfg, false};
  check_boundary(field.a, "initial state, branch A");
  check_boundary(field.b, "initial state, branch B");
  return field;
}

BranchedField propagate_analytic(const BranchedField& field, double t) {
  if (!field.origin || field.origin->masked || field.time() != 0.0) {
    throw validation_error(kModule, "closed-form propagation needs an unmasked t = 0 initial state");
  }
  if (!(t >= 0.0)) throw validation_error(kModule, "time must be non-negative");
  const SlitConfig& cfg = field.origin->slit;
  BranchedField out;
  out.a = analytic_mode(cfg, field.grid(), t, cfg.y0);
  out.b = analytic_mode(cfg, field.grid(), t, -cfg.y0);
  out.a.values *= cfg.amp_a;
  out.b.values *= cfg.amp_b;
  out.origin = field.origin;
  check_boundary(out.a, "analytic propagation, branch A");
  check_boundary(out.b, "analytic propagation, branch B");
  return out;
}

WaveField gaussian_packet(const Grid& grid, double center, double epsilon, double wavenumber,
                          Complex amplitude) {
  grid.validate();
  if (!(epsilon > 0.0)) throw validation_error(kModule, "packet width must be positive");
  const double norm = std::pow(std::numbers::pi / 2.0, -0.25) / std::sqrt(epsilon);
  WaveField packet{grid, Eigen::VectorXcd(static_cast<Eigen::Index>(grid.n_points)), 0.0};
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double y = grid.y(i);
    const double d = (y - center) / epsilon;
    packet.values(static_cast<Eigen::Index>(i)) =
        amplitude * norm * std::exp(-d * d) * std::polar(1.0, wavenumber * y);
  }
  check_boundary(packet, "moving packet");
  return packet;
}

namespace {

double wavenumber(std::size_t j, std::size_t n, double dy) {
  const double index =
      j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
  return index * 2.0 * std::numbers::pi / (static_cast<double>(n) * dy);
}

}  // namespace

Spectrum spectrum_of(const WaveField& field) {
  const auto n = static_cast<std::size_t>(field.values.size());
  Eigen::FFT<double> fft;
  std::vector<Complex> spatial(field.values.data(), field.values.data() + n);
  std::vector<Complex> spectrum;
  fft.fwd(spectrum, spatial);
  Spectrum out{Eigen::VectorXcd(static_cast<Eigen::Index>(n)),
               Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (std::size_t j = 0; j < n; ++j) {
    out.values(static_cast<Eigen::Index>(j)) = spectrum[j];
    out.wavenumbers(static_cast<Eigen::Index>(j)) = wavenumber(j, n, field.grid.dy());
  }
  return out;
}

WaveField propagate_spectral(const WaveField& field, double dt, double mass, double hbar) {
  if (!(mass > 0.0) || !(hbar > 0.0)) throw validation_error(kModule, "mass and hbar must be positive");
  const auto n = static_cast<std::size_t>(field.values.size());
  if (n != field.grid.n_points) throw validation_error(kModule, "field size does not match grid");
  WaveField out{field.grid, field.values, field.time + dt};
  if (dt == 0.0) return out;

  Eigen::FFT<double> fft;
  std::vector<Complex> spatial(field.values.data(), field.values.data() + n);
  std::vector<Complex> spectrum;
  fft.fwd(spectrum, spatial);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = wavenumber(j, n, field.grid.dy());
    spectrum[j] *= std::polar(1.0, -hbar * k * k * dt / (2.0 * mass));
  }
  fft.inv(spatial, spectrum);
  for (std::size_t i = 0; i < n; ++i) out.values(static_cast<Eigen::Index>(i)) = spatial[i];
  check_boundary(out, "spectral propagation");
  return out;
}

BranchedField propagate_spectral(const BranchedField& field, double dt, double mass, double hbar) {
  BranchedField out;
  out.a = propagate_spectral(field.a, dt, mass, hbar);
  out.b = propagate_spectral(field.b, dt, mass, hbar);
  out.origin = field.origin;
  return out;
}

CoshSinhParts cosh_sinh_decompose(const BranchedField& field) {
  if (!field.origin || field.origin->masked) {
    throw validation_error(kModule, "cosh/sinh split needs an unmasked closed-form field");
  }
  const SlitConfig& cfg = field.origin->slit;
  const Grid& grid = field.grid();
  const double t = field.time();
  const Complex c = packet_prefactor(cfg, t);
  const Complex w = omega(cfg, t);
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  CoshSinhParts parts;
  for (WaveField* f : {&parts.cosh_a, &parts.sinh_a, &parts.cosh_b, &parts.sinh_b}) {
    *f = WaveField{grid, Eigen::VectorXcd(n), t};
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = grid.y(static_cast<std::size_t>(i));
    const Complex p = -(y * y + cfg.y0 * cfg.y0) / w;
    const Complex s = 2.0 * y * cfg.y0 / w;
    const auto [ch, sh] = scaled_cosh_sinh(p, s);
    parts.cosh_a.values(i) = cfg.amp_a * c * ch;
    parts.sinh_a.values(i) = cfg.amp_a * c * sh;
    parts.cosh_b.values(i) = cfg.amp_b * c * ch;
    parts.sinh_b.values(i) = cfg.amp_b * c * sh;
  }
  return parts;
}

double relative_l2(const WaveField& field, const WaveField& reference) {
  require_same_grid(field, reference);
  const double ref = reference.values.norm();
  if (ref == 0.0) throw validation_error(kModule, "reference field is zero");
  return (field.values - reference.values).norm() / ref;
}

void write_wavefield_csv(std::ostream& out, const WaveField& field, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << "y,re,im,intensity\n";
  char line[128];
  for (std::size_t i = 0; i < field.grid.n_points; i += stride) {
    const Complex v = field.values(static_cast<Eigen::Index>(i));
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", field.grid.y(i), v.real(),
                  v.imag(), std::norm(v));
    out << line;
  }
}

WaveField read_wavefield_csv(std::istream& in, double time) {
  std::string line;
  if (!std::getline(in, line) || line != "y,re,im,intensity") {
    throw validation_error(kModule, "missing wavefield CSV header");
  }
  std::vector<double> ys;
  std::vector<Complex> vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double y = 0, re = 0, im = 0, intensity = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &y, &re, &im, &intensity) != 4) {
      throw validation_error(kModule, "malformed wavefield CSV row: " + line);
    }
    ys.push_back(y);
    vs.emplace_back(re, im);
  }
  if (ys.size() < 2) throw validation_error(kModule, "wavefield CSV needs at least two rows");
  WaveField field;
  const double dy = (ys.back() - ys.front()) / static_cast<double>(ys.size() - 1);
  field.grid = Grid{ys.size(), ys.front(), ys.front() + dy * static_cast<double>(ys.size())};
  field.values = Eigen::Map<Eigen::VectorXcd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  field.time = time;
  return field;
}

}  // namespace whichway
