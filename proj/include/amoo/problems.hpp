#ifndef AMOO_PROBLEMS_HPP
#define AMOO_PROBLEMS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "amoo/core.hpp"

// Synthetic objective families with analytically known f_i*, G and beta,
// plus gradient checking and dataset persistence.

namespace amoo {

using Matrix = Eigen::MatrixXd;

// All randomness flows through mt19937_64 seeded via splitmix64 so that a
// (seed, stream) pair reproduces bit-identically across platforms. Distinct
// streams of the same seed are independent for our purposes.
std::uint64_t splitmix64(std::uint64_t& state);
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// ----------------------------------------------------------------------------
// Absolute-coordinate family: f_i(x) = |x_i|, the worst case for equal
// weighting with Polyak steps. Canonical start (a, eps, ..., eps, 0, ..., 0)
// with a = (m-1)*eps and m-1 copies of eps.
struct LowerBoundProblem {
  int m = 0;
  int n = 0;
  double eps_param = 0.0;
  double a = 0.0;  // (m-1) * eps_param
  ObjectiveSet objectives;
  Point start;
};

LowerBoundProblem make_lower_bound_problem(int m, int n, double eps_param);

// Closed form of the equal-weight Polyak iterates on LowerBoundProblem:
// first coordinate a(1-2/m)^{k-1}, remaining active coordinates
// eps(-1)^{k-1}(1-2/m)^{k-1}. k is 1-based.
double closed_form_first_coordinate(int m, double a, int k);
double closed_form_other_coordinate(int m, double eps_param, int k);

// sqrt(m-1)/3 * G * dist / sqrt(K). The worst-case trajectory satisfies
// MG(x_bar_K) >= ma/(m+2K) for every K <= m; the sqrt(K) form printed here
// is implied by it only for m/4 <= K <= m, and within_validity is false
// outside that window.
struct LowerBoundValue {
  double value = 0.0;
  bool within_validity = true;
};
LowerBoundValue ew_lower_bound_value(int m, double lipschitz, double dist, int K);

// ----------------------------------------------------------------------------
// Aligned diagonal quadratics f_i(x) = 1/2 x^T D_i x with D_i >= 0.
// All objectives are minimized on the common null-coordinate set
// { x : x_j = 0 for every j supported by some D_i }.
struct QuadraticFamily {
  std::vector<Point> diagonals;
  std::vector<int> supported_coords;  // union of supports, sorted
  double beta_max = 0.0;
  ObjectiveSet objectives;
};

// Random aligned family: `shared_null` coordinates have zero curvature in
// every objective, the rest carry curvature in [0.05, 2] and are further
// zeroed per-objective with probability `drop_prob`.
QuadraticFamily make_quadratic_family(int m, int n, int shared_null,
                                      std::uint64_t seed,
                                      double drop_prob = 0.3);

// ----------------------------------------------------------------------------
// Piecewise-linear Lipschitz family f_i(x) = |g_i^T (x - anchor)| with
// random directions g_i. C* is the affine set { g_i^T (x - anchor) = 0 }.
struct PiecewiseLinearFamily {
  Matrix directions;  // n x m, column i = g_i
  Point anchor;
  double lipschitz = 0.0;  // max_i ||g_i||
  ObjectiveSet objectives;
};

PiecewiseLinearFamily make_piecewise_linear_family(int m, int n,
                                                   std::uint64_t seed);

// ----------------------------------------------------------------------------
// Approximately aligned Lipschitz family
//   f_i(x) = |x_0 - c_i| + |x_i|,  c = (0, +delta, -delta, ...)
// No common exact minimizer for delta > 0; the origin attains gap delta on
// every objective, so C_eps is non-empty for every eps >= delta.
struct EpsilonShiftedFamily {
  int m = 0;
  double delta = 0.0;
  std::vector<double> shifts;
  double lipschitz = 0.0;  // sqrt(2)
  ObjectiveSet objectives;
};

EpsilonShiftedFamily make_epsilon_shifted_family(int m, int n, double delta,
                                                 double alignment_epsilon);

// ----------------------------------------------------------------------------
// Power-quadratic loss on a displacement vector d in R^{d_o}:
//   loss(d) = ((d - shift*1)^T H (d - shift*1))^alpha,  H diagonal > 0,
// averaged over a batch of displacement columns. alpha >= 1 keeps the
// composition convex in d.
struct PowerQuadraticLoss {
  Point h_diag;
  double alpha = 1.0;
  double shift = 0.0;

  double quadratic(const Point& d) const;   // (d-s1)^T H (d-s1)
  double value(const Point& d) const;       // quadratic^alpha
  Point gradient(const Point& d) const;
  double batch_value(const Matrix& d) const;
  // Gradient of batch_value with respect to the displacement columns.
  Matrix batch_cotangent(const Matrix& d) const;
};

// Loss presets mirroring experiment problems P1-P3. P3 draws its diagonal
// scales u_j from Uniform[0,1) of the given seed; the first
// `unscaled` entries keep scale 1, the rest are multiplied by 1e-3.
std::vector<PowerQuadraticLoss> make_p1_losses(int d_o);
std::vector<PowerQuadraticLoss> make_p2_losses(int d_o);
std::vector<PowerQuadraticLoss> make_p3_losses(int d_o, std::uint64_t seed,
                                               int unscaled = 10);

// Objective set of power-quadratic losses under the identity displacement
// d(theta) = theta. f_i* = 0, attained at theta = shift_i * 1.
ObjectiveSet make_power_quadratic_problem(
    const std::vector<PowerQuadraticLoss>& losses, int d_o);

// ----------------------------------------------------------------------------
// Central finite-difference check. Returns the maximum over coordinates of
// |analytic - numeric| / max(1, |numeric|). The caller avoids kinks.
double gradient_check(const Objective& obj, const Point& x, double h = 1e-5);

// ----------------------------------------------------------------------------
// Dataset cache: little-endian float64 matrix with a 16-byte header
// (magic "AMOD", u32 version, u32 rows, u32 cols), column-major payload.
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

}  // namespace amoo

#endif
