#include "diraclayer/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "diraclayer/quadrature.hpp"

namespace diraclayer {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const Complex kI(0.0, 1.0);
constexpr double kGolden = 0.6180339887498948482;  // (sqrt(5) - 1) / 2

double perimeter_of(const Eigen::VectorXcd& modes, int K) {
  // trapezoid of the smooth periodic speed; spectrally accurate
  const int M = std::max(2048, 16 * K + 64);
  double acc = 0.0;
  for (int j = 0; j < M; ++j) {
    Complex d = 0.0;
    for (int n = -K; n <= K; ++n)
      d += modes(K + n) * (2.0 * kPi * kI * static_cast<double>(n)) *
           std::exp(2.0 * kPi * kI * (static_cast<double>(n) * j / M));
    acc += std::abs(d);
  }
  return acc / M;
}

}  // namespace

Curve2D::Curve2D(Eigen::VectorXcd modes) : modes_(std::move(modes)) {
  if (modes_.size() % 2 == 0 || modes_.size() < 3)
    throw std::invalid_argument("Curve2D: modes must list c_n for n = -K..K, K >= 1");
  K_ = static_cast<int>(modes_.size() / 2);
  length_ = perimeter_of(modes_, K_);
  if (!(length_ > 0.0)) throw std::invalid_argument("Curve2D: degenerate curve");
}

Complex Curve2D::point(double t) const {
  Complex w = 0.0;
  for (int n = -K_; n <= K_; ++n)
    w += modes_(K_ + n) * std::exp(2.0 * kPi * kI * (static_cast<double>(n) * t));
  return w;
}

Complex Curve2D::derivative(double t, int order) const {
  Complex w = 0.0;
  for (int n = -K_; n <= K_; ++n) {
    Complex f = 1.0;
    for (int q = 0; q < order; ++q) f *= 2.0 * kPi * kI * static_cast<double>(n);
    w += f * modes_(K_ + n) * std::exp(2.0 * kPi * kI * (static_cast<double>(n) * t));
  }
  return w;
}

Eigen::VectorXcd Curve2D::fourier_coeffs_x() const {
  // x = (W + conj(W))/2, so x_n = (c_n + conj(c_{-n}))/2
  Eigen::VectorXcd cx(modes_.size());
  for (int n = -K_; n <= K_; ++n)
    cx(K_ + n) = 0.5 * (modes_(K_ + n) + std::conj(modes_(K_ - n)));
  return cx;
}

Eigen::VectorXcd Curve2D::fourier_coeffs_y() const {
  Eigen::VectorXcd cy(modes_.size());
  for (int n = -K_; n <= K_; ++n)
    cy(K_ + n) = (modes_(K_ + n) - std::conj(modes_(K_ - n))) / (2.0 * kI);
  return cy;
}

double Curve2D::signed_area() const {
  // (1/2) Im int conj(W) W' dt = pi sum n |c_n|^2
  double a = 0.0;
  for (int n = -K_; n <= K_; ++n) a += n * std::norm(modes_(K_ + n));
  return kPi * a;
}

double Curve2D::arclength_defect() const {
  const int M = std::max(1024, 8 * K_);
  double d = 0.0;
  for (int j = 0; j < M; ++j)
    d = std::max(d, std::abs(std::abs(derivative(static_cast<double>(j) / M)) - length_));
  return d;
}

Curve2D::Nodes Curve2D::nodes(int M) const {
  if (M < 3) throw std::invalid_argument("Curve2D::nodes: M must be >= 3");
  Nodes nd;
  nd.t.resize(M);
  nd.s.resize(M);
  nd.W.resize(M);
  nd.Wp.resize(M);
  nd.Wpp.resize(M);
  nd.nu.resize(M, 2);
  for (int j = 0; j < M; ++j) {
    const double t = static_cast<double>(j) / M;
    nd.t(j) = t;
    nd.s(j) = length_ * t;
    Complex w = 0.0, wp = 0.0, wpp = 0.0;
    for (int n = -K_; n <= K_; ++n) {
      const Complex e = modes_(K_ + n) * std::exp(2.0 * kPi * kI * (static_cast<double>(n) * t));
      const Complex f = 2.0 * kPi * kI * static_cast<double>(n);
      w += e;
      wp += f * e;
      wpp += f * f * e;
    }
    nd.W(j) = w;
    nd.Wp(j) = wp;
    nd.Wpp(j) = wpp;
    const double sp = std::abs(wp);
    nd.nu(j, 0) = wp.imag() / sp;   // outward for positive orientation
    nd.nu(j, 1) = -wp.real() / sp;
  }
  return nd;
}

namespace {

void check_simple(const Curve2D& c) {
  const int M = 256;
  const auto nd = c.nodes(M);
  double worst = 1e30;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      const int d = std::min(j - i, M - (j - i));
      const double arc = c.length() * d / M;
      worst = std::min(worst, std::abs(nd.W(i) - nd.W(j)) / arc);
    }
  if (worst < 0.1) {
    std::ostringstream os;
    os << "curve fails simplicity check: min chord/arc ratio " << worst;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

Curve2D reparametrize_arclength(const Curve2D& raw, int n_modes) {
  if (n_modes < std::max(raw.max_mode(), 1))
    throw std::invalid_argument("reparametrize_arclength: n_modes below curve bandwidth");
  if (raw.signed_area() <= 0.0)
    throw std::invalid_argument("reparametrize_arclength: curve must be positively oriented");

  // Fourier series of the speed v(t) = |W'(t)| from a fine sample
  const int Mf = std::max(4096, 16 * raw.max_mode());
  const int nk = std::min(Mf / 2 - 1, 768);
  Eigen::VectorXd v(Mf);
  for (int j = 0; j < Mf; ++j) v(j) = std::abs(raw.derivative(static_cast<double>(j) / Mf));
  Eigen::VectorXcd a(2 * nk + 1);
  for (int n = -nk; n <= nk; ++n) {
    Complex acc = 0.0;
    for (int j = 0; j < Mf; ++j)
      acc += v(j) * std::exp(-2.0 * kPi * kI * (static_cast<double>(n) * j / Mf));
    a(nk + n) = acc / static_cast<double>(Mf);
  }
  const double ell = a(nk).real();  // mean speed = length

  // s(t) = ell*t + sum_{n != 0} a_n (e^{2 pi i n t} - 1)/(2 pi i n), invert by Newton
  auto arclen = [&](double t) {
    Complex acc = 0.0;
    for (int n = -nk; n <= nk; ++n) {
      if (n == 0) continue;
      acc += a(nk + n) * (std::exp(2.0 * kPi * kI * (static_cast<double>(n) * t)) - 1.0) /
             (2.0 * kPi * kI * static_cast<double>(n));
    }
    return ell * t + acc.real();
  };
  auto speed = [&](double t) {
    Complex acc = 0.0;
    for (int n = -nk; n <= nk; ++n)
      acc += a(nk + n) * std::exp(2.0 * kPi * kI * (static_cast<double>(n) * t));
    return acc.real();
  };

  const int M = 2 * n_modes + 1;
  Eigen::VectorXcd samples(M);
  double worst_res = 0.0;
  for (int kidx = 0; kidx < M; ++kidx) {
    const double target = ell * kidx / M;
    double t = static_cast<double>(kidx) / M;
    double res = 0.0;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      res = arclen(t) - target;
      if (std::abs(res) <= 1e-12 * ell) {
        ok = true;
        break;
      }
      t -= res / speed(t);
    }
    if (!ok) {
      std::ostringstream os;
      os << "reparametrize_arclength: Newton stalled at node " << kidx
         << ", residual " << std::abs(res) / ell;
      throw std::runtime_error(os.str());
    }
    worst_res = std::max(worst_res, std::abs(res) / ell);
    samples(kidx) = raw.point(t);
  }

  // analyze the resampled boundary back into n_modes Fourier modes
  Eigen::VectorXcd modes(M);
  for (int n = -n_modes; n <= n_modes; ++n) {
    Complex acc = 0.0;
    for (int j = 0; j < M; ++j)
      acc += samples(j) * std::exp(-2.0 * kPi * kI * (static_cast<double>(n) * j / M));
    modes(n_modes + n) = acc / static_cast<double>(M);
  }
  Curve2D out(modes);
  check_simple(out);
  return out;
}

Curve2D build_preset_curve(const std::string& name,
                           const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "circle") {
    const double r = get("r", 1.0);
    if (!(r > 0.0)) throw std::invalid_argument("circle: radius must be positive");
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(3);
    m(2) = r;  // c_1 = r: already arc-length parametrized
    return Curve2D(m);
  }
  if (name == "ellipse") {
    const double aa = get("a", 1.0), bb = get("b", 0.6);
    if (!(aa > 0.0) || !(bb > 0.0))
      throw std::invalid_argument("ellipse: semi-axes must be positive");
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(3);
    m(2) = 0.5 * (aa + bb);  // a cos(2 pi t) + i b sin(2 pi t)
    m(0) = 0.5 * (aa - bb);
    return reparametrize_arclength(Curve2D(m), static_cast<int>(get("n_modes", 64)));
  }
  if (name == "bean") {
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(7);  // n = -3..3
    m(2) = Complex(0.0, 0.05);   // c_{-1}
    m(3) = 0.075;                // c_0
    m(4) = 1.0;                  // c_1
    m(5) = 0.075;                // c_2
    m(6) = Complex(0.0, -0.05);  // c_3
    return reparametrize_arclength(Curve2D(m), static_cast<int>(get("n_modes", 96)));
  }
  throw std::invalid_argument("build_preset_curve: unknown preset '" + name + "'");
}

SphereGrid build_sphere_grid(int level, bool staggered) {
  if (level < 1) throw std::invalid_argument("build_sphere_grid: level must be >= 1");
  const int nt = 12 * level;
  auto [cs, wt] = gauss_legendre(nt);

  std::vector<Eigen::Vector3d> pts;
  std::vector<double> ws;
  int min_m = 1 << 30;
  auto add_ring = [&](double c, double wring, double offset) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const int m = std::max(6, 2 * static_cast<int>(std::ceil(0.5 * (2.0 * nt * s))));
    min_m = std::min(min_m, m);
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * kPi * (static_cast<double>(k) / m + offset);
      pts.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
      ws.push_back(wring * 2.0 * kPi / m);
    }
  };

  SphereGrid g;
  g.level = level;
  g.antipodal = !staggered;
  if (!staggered) {
    for (int i = 0; i < nt; ++i)
      if (cs(i) > 0.0) add_ring(cs(i), wt(i), 0.0);
    const int nh = static_cast<int>(pts.size());
    g.nodes.resize(2 * nh, 3);
    g.weights.resize(2 * nh);
    g.antipodal_map.resize(2 * nh);
    for (int i = 0; i < nh; ++i) {
      g.nodes.row(i) = pts[i];
      g.nodes.row(nh + i) = -pts[i];  // exact antipode, bitwise
      g.weights(i) = ws[i];
      g.weights(nh + i) = ws[i];
      g.antipodal_map[i] = nh + i;
      g.antipodal_map[nh + i] = i;
    }
  } else {
    int ring = 0;
    for (int i = 0; i < nt; ++i) {
      const double off = std::fmod(ring * kGolden, 1.0);
      add_ring(cs(i), wt(i), off);
      ++ring;
    }
    const int n = static_cast<int>(pts.size());
    g.nodes.resize(n, 3);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      g.nodes.row(i) = pts[i];
      g.weights(i) = ws[i];
    }
  }
  g.exact_degree = std::min(2 * nt - 1, min_m - 1);
  return g;
}

}  // namespace diraclayer
