#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace diraclayer {

using Complex = std::complex<double>;

// Smooth closed curve W(t) = sum_{|n| <= K} c_n e^{2 pi i n t}, t in [0, 1),
// positively oriented (counterclockwise), identified with C = R^2.
class Curve2D {
 public:
  Curve2D() = default;
  // modes(K + n) = c_n for n = -K..K
  explicit Curve2D(Eigen::VectorXcd modes);

  Complex point(double t) const;
  Complex derivative(double t, int order = 1) const;
  double length() const { return length_; }
  int max_mode() const { return K_; }
  const Eigen::VectorXcd& modes() const { return modes_; }
  Eigen::VectorXcd fourier_coeffs_x() const;
  Eigen::VectorXcd fourier_coeffs_y() const;
  double signed_area() const;
  // max over a fine grid of | |W'(t)| - length |; zero iff arc-length parametrized
  double arclength_defect() const;

  struct Nodes {
    Eigen::VectorXd t;    // t_j = j/M
    Eigen::VectorXd s;    // arc length s_j = length * t_j (arc-length curves)
    Eigen::VectorXcd W;   // W(t_j)
    Eigen::VectorXcd Wp;  // W'(t_j)
    Eigen::VectorXcd Wpp;
    Eigen::Matrix<double, Eigen::Dynamic, 2> nu;  // outward unit normal
  };
  Nodes nodes(int M) const;

 private:
  Eigen::VectorXcd modes_;
  int K_ = 0;
  double length_ = 0.0;
};

// Resample a simple smooth curve by arc length: the result satisfies
// |W'(t)| = length to Newton tolerance 1e-12 and carries n_modes Fourier modes.
// Throws if the iteration stalls (residual reported) or the curve fails the
// pairwise node-distance simplicity check.
Curve2D reparametrize_arclength(const Curve2D& raw, int n_modes);

// Presets: "circle" (params: r), "ellipse" (params: a, b), "bean" (fixed shape).
// All returned curves are arc-length parametrized and positively oriented.
Curve2D build_preset_curve(const std::string& name,
                           const std::map<std::string, double>& params);

// Quadrature grid on the unit sphere S^2: Gauss-Legendre rings in cos(theta)
// with even per-ring azimuth counts, closed under the antipodal map x -> -x.
struct SphereGrid {
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes;  // row i: x_i, |x_i| = 1
  Eigen::VectorXd weights;                         // sum = 4 pi
  std::vector<int> antipodal_map;                  // nodes.row(map[i]) == -nodes.row(i)
  int level = 1;
  int exact_degree = 5;  // spherical-polynomial degree integrated exactly
  bool antipodal = true;
  int size() const { return static_cast<int>(weights.size()); }
};

// level >= 1; node count grows like O(level^2) * O(level) rings. The staggered
// variant rotates each ring by a golden-angle offset and breaks the antipodal
// symmetry; it exists for ablation controls only.
SphereGrid build_sphere_grid(int level, bool staggered = false);

}  // namespace diraclayer
