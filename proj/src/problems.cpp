#include "amoo/problems.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace amoo {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xA5A5A5A5DEADBEEFULL * (stream + 1));
  std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state),
                    splitmix64(state)};
  return std::mt19937_64(seq);
}

namespace {

double sign_or_zero(double v) {
  if (v > 0) return 1.0;
  if (v < 0) return -1.0;
  return 0.0;  // valid subgradient of |.| at the kink
}

}  // namespace

// ----------------------------------------------------------------------------

LowerBoundProblem make_lower_bound_problem(int m, int n, double eps_param) {
  if (m < 2 || n < m) {
    throw ConfigError("lower-bound problem needs n >= m >= 2");
  }
  if (eps_param <= 0) {
    throw ConfigError("lower-bound problem needs eps_param > 0");
  }
  LowerBoundProblem p;
  p.m = m;
  p.n = n;
  p.eps_param = eps_param;
  p.a = (m - 1) * eps_param;

  p.objectives.dimension = n;
  for (int i = 0; i < m; ++i) {
    Objective obj;
    obj.name = "abs_x" + std::to_string(i);
    obj.optimal_value = 0.0;
    obj.lipschitz_bound = 1.0;
    obj.value = [i](const Point& x) { return std::abs(x[i]); };
    obj.gradient = [i, n](const Point& x) {
      Point g = Point::Zero(n);
      g[i] = sign_or_zero(x[i]);
      return g;
    };
    p.objectives.objectives.push_back(std::move(obj));
  }
  p.objectives.solution_projection = [m](const Point& x) {
    Point y = x;
    y.head(m).setZero();
    return y;
  };

  p.start = Point::Zero(n);
  p.start[0] = p.a;
  for (int i = 1; i < m; ++i) p.start[i] = eps_param;
  return p;
}

double closed_form_first_coordinate(int m, double a, int k) {
  return a * std::pow(1.0 - 2.0 / m, k - 1);
}

double closed_form_other_coordinate(int m, double eps_param, int k) {
  const double mag = eps_param * std::pow(1.0 - 2.0 / m, k - 1);
  return (k % 2 == 1) ? mag : -mag;
}

LowerBoundValue ew_lower_bound_value(int m, double lipschitz, double dist,
                                     int K) {
  if (m < 2 || K < 1 || dist <= 0) {
    throw UsageError("ew_lower_bound_value needs m >= 2, K >= 1, dist > 0");
  }
  LowerBoundValue r;
  r.value = std::sqrt(static_cast<double>(m - 1)) / 3.0 * lipschitz * dist /
            std::sqrt(static_cast<double>(K));
  // ma/(m+2K) >= sqrt(mK) a / (3K) reduces to (2x-1)(x-1) <= 0 for
  // x = sqrt(K/m): the sqrt(K) form is implied only on m/4 <= K <= m.
  r.within_validity = K <= m && 4 * K >= m;
  return r;
}

// ----------------------------------------------------------------------------

QuadraticFamily make_quadratic_family(int m, int n, int shared_null,
                                      std::uint64_t seed, double drop_prob) {
  if (m < 1 || n < 1 || shared_null < 0 || shared_null >= n) {
    throw ConfigError("quadratic family needs m,n >= 1 and 0 <= shared_null < n");
  }
  auto rng = make_rng(seed, 11);
  std::uniform_real_distribution<double> curvature(0.05, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  QuadraticFamily fam;
  fam.objectives.dimension = n;
  std::vector<bool> supported(n, false);
  for (int i = 0; i < m; ++i) {
    Point d = Point::Zero(n);
    for (int j = shared_null; j < n; ++j) {
      if (unit(rng) >= drop_prob) d[j] = curvature(rng);
    }
    // keep every objective non-trivial
    if (d.maxCoeff() <= 0) d[n - 1] = curvature(rng);
    for (int j = 0; j < n; ++j) {
      if (d[j] > 0) supported[j] = true;
    }
    fam.beta_max = std::max(fam.beta_max, d.maxCoeff());
    fam.diagonals.push_back(d);

    Objective obj;
    obj.name = "quad_" + std::to_string(i);
    obj.optimal_value = 0.0;
    obj.smoothness_bound = d.maxCoeff();
    obj.value = [d](const Point& x) {
      return 0.5 * x.cwiseProduct(x).dot(d);
    };
    obj.gradient = [d](const Point& x) { return d.cwiseProduct(x).eval(); };
    fam.objectives.objectives.push_back(std::move(obj));
  }
  for (int j = 0; j < n; ++j) {
    if (supported[j]) fam.supported_coords.push_back(j);
  }
  auto supported_coords = fam.supported_coords;
  fam.objectives.solution_projection = [supported_coords](const Point& x) {
    Point y = x;
    for (int j : supported_coords) y[j] = 0.0;
    return y;
  };
  return fam;
}

// ----------------------------------------------------------------------------

PiecewiseLinearFamily make_piecewise_linear_family(int m, int n,
                                                   std::uint64_t seed) {
  if (m < 1 || n < m) {
    throw ConfigError("piecewise-linear family needs n >= m >= 1");
  }
  auto rng = make_rng(seed, 23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.8, 1.0);

  PiecewiseLinearFamily fam;
  fam.directions.resize(n, m);
  fam.anchor = Point::Zero(n);
  for (int j = 0; j < n; ++j) fam.anchor[j] = gauss(rng) * 0.5;

  for (int i = 0; i < m; ++i) {
    Point g(n);
    for (int j = 0; j < n; ++j) g[j] = gauss(rng);
    g *= scale(rng) / g.norm();
    fam.directions.col(i) = g;
    fam.lipschitz = std::max(fam.lipschitz, g.norm());
  }

  fam.objectives.dimension = n;
  const Point anchor = fam.anchor;
  for (int i = 0; i < m; ++i) {
    const Point g = fam.directions.col(i);
    Objective obj;
    obj.name = "pl_" + std::to_string(i);
    obj.optimal_value = 0.0;
    obj.lipschitz_bound = g.norm();
    obj.value = [g, anchor](const Point& x) {
      return std::abs(g.dot(x - anchor));
    };
    obj.gradient = [g, anchor](const Point& x) {
      return (sign_or_zero(g.dot(x - anchor)) * g).eval();
    };
    fam.objectives.objectives.push_back(std::move(obj));
  }

  // Projection onto the affine set {B^T (x - anchor) = 0}.
  const Matrix b = fam.directions;
  const Matrix gram = b.transpose() * b;
  const Eigen::LDLT<Matrix> solver(gram);
  fam.objectives.solution_projection = [b, solver, anchor](const Point& x) {
    const Point r = b.transpose() * (x - anchor);
    return (x - b * solver.solve(r)).eval();
  };
  return fam;
}

// ----------------------------------------------------------------------------

EpsilonShiftedFamily make_epsilon_shifted_family(int m, int n, double delta,
                                                 double alignment_epsilon) {
  if (m < 2 || n < m + 1) {
    throw ConfigError("epsilon-shifted family needs m >= 2 and n >= m+1");
  }
  if (delta < 0 || alignment_epsilon < delta) {
    throw ConfigError(
        "epsilon-shifted family needs 0 <= delta <= alignment_epsilon");
  }
  EpsilonShiftedFamily fam;
  fam.m = m;
  fam.delta = delta;
  fam.lipschitz = std::sqrt(2.0);
  fam.objectives.dimension = n;
  fam.objectives.alignment_epsilon = alignment_epsilon;

  for (int i = 0; i < m; ++i) {
    double c = 0.0;
    if (i > 0) c = (i % 2 == 1) ? delta : -delta;
    fam.shifts.push_back(c);
    Objective obj;
    obj.name = "shifted_" + std::to_string(i);
    obj.optimal_value = 0.0;
    obj.lipschitz_bound = std::sqrt(2.0);
    const int coord = i + 1;
    obj.value = [c, coord](const Point& x) {
      return std::abs(x[0] - c) + std::abs(x[coord]);
    };
    obj.gradient = [c, coord, n](const Point& x) {
      Point g = Point::Zero(n);
      g[0] = sign_or_zero(x[0] - c);
      g[coord] = sign_or_zero(x[coord]);
      return g;
    };
    fam.objectives.objectives.push_back(std::move(obj));
  }

  // The origin block is a C_eps witness: gaps are (0, delta, delta, ...).
  fam.objectives.solution_projection = [m](const Point& x) {
    Point y = x;
    y.head(m + 1).setZero();
    return y;
  };
  return fam;
}

// ----------------------------------------------------------------------------

double PowerQuadraticLoss::quadratic(const Point& d) const {
  const Point r = d.array() - shift;
  return r.cwiseProduct(r).dot(h_diag);
}

double PowerQuadraticLoss::value(const Point& d) const {
  const double q = quadratic(d);
  if (alpha == 1.0) return q;
  return std::pow(q, alpha);
}

double PowerQuadraticLoss::batch_value(const Matrix& d) const {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    sum += value(d.col(c));
  }
  return sum / static_cast<double>(d.cols());
}

Point PowerQuadraticLoss::gradient(const Point& d) const {
  const Point r = d.array() - shift;
  double outer = 1.0;
  if (alpha != 1.0) {
    outer = alpha * std::pow(r.cwiseProduct(r).dot(h_diag), alpha - 1.0);
  }
  return 2.0 * outer * h_diag.cwiseProduct(r);
}

Matrix PowerQuadraticLoss::batch_cotangent(const Matrix& d) const {
  Matrix cot(d.rows(), d.cols());
  const double inv_n = 1.0 / static_cast<double>(d.cols());
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    const Point r = d.col(c).array() - shift;
    double outer = 1.0;
    if (alpha != 1.0) {
      const double q = r.cwiseProduct(r).dot(h_diag);
      outer = alpha * std::pow(q, alpha - 1.0);
    }
    cot.col(c) = inv_n * outer * 2.0 * h_diag.cwiseProduct(r);
  }
  return cot;
}

namespace {

std::vector<PowerQuadraticLoss> switching_losses(int d_o,
                                                 const Point& h_diag,
                                                 const std::vector<double>& shifts) {
  const double alphas[3] = {1.0, 1.5, 2.0};
  std::vector<PowerQuadraticLoss> losses;
  for (int i = 0; i < 3; ++i) {
    PowerQuadraticLoss loss;
    loss.h_diag = h_diag;
    loss.alpha = alphas[i];
    loss.shift = shifts[i];
    losses.push_back(std::move(loss));
  }
  (void)d_o;
  return losses;
}

}  // namespace

std::vector<PowerQuadraticLoss> make_p1_losses(int d_o) {
  return switching_losses(d_o, Point::Ones(d_o), {0.0, 0.0, 0.0});
}

std::vector<PowerQuadraticLoss> make_p2_losses(int d_o) {
  return switching_losses(d_o, Point::Ones(d_o), {0.0, 0.05, -0.05});
}

std::vector<PowerQuadraticLoss> make_p3_losses(int d_o, std::uint64_t seed,
                                               int unscaled) {
  auto rng = make_rng(seed, 31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point h(d_o);
  for (int j = 0; j < d_o; ++j) {
    const double scale = (j < unscaled) ? 1.0 : 1e-3;
    h[j] = 0.5 * (unit(rng) + 1.0) * scale;
  }
  return switching_losses(d_o, h, {0.0, 0.01, -0.01});
}

ObjectiveSet make_power_quadratic_problem(
    const std::vector<PowerQuadraticLoss>& losses, int d_o) {
  ObjectiveSet set;
  set.dimension = d_o;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const PowerQuadraticLoss& loss = losses[i];
    if (loss.alpha < 1.0) {
      throw ConfigError("power-quadratic loss needs alpha >= 1");
    }
    if (loss.h_diag.size() != d_o || loss.h_diag.minCoeff() <= 0) {
      throw ConfigError("power-quadratic loss needs a positive diagonal of size d_o");
    }
    Objective obj;
    obj.name = "powquad_" + std::to_string(i);
    obj.optimal_value = 0.0;
    if (loss.alpha == 1.0) {
      obj.smoothness_bound = 2.0 * loss.h_diag.maxCoeff();
    }
    obj.value = [loss](const Point& theta) { return loss.value(theta); };
    obj.gradient = [loss](const Point& theta) { return loss.gradient(theta); };
    set.objectives.push_back(std::move(obj));
  }
  double max_shift_gap = 0.0;
  for (const auto& loss : losses) {
    // value of loss at theta = 0
    max_shift_gap = std::max(max_shift_gap, loss.value(Point::Zero(d_o)));
  }
  set.alignment_epsilon = max_shift_gap;
  set.solution_projection = [d_o](const Point&) {
    return Point::Zero(d_o);
  };

  // Fused paths: when the objectives share H and shift, the quadratic form
  // is computed once and only the scalar powers differ.
  bool shared = true;
  for (const auto& loss : losses) {
    if (loss.shift != losses[0].shift || loss.h_diag != losses[0].h_diag) {
      shared = false;
    }
  }
  if (shared) {
    const PowerQuadraticLoss base = losses[0];
    std::vector<double> alphas;
    for (const auto& loss : losses) alphas.push_back(loss.alpha);
    set.all_values = [base, alphas](const Point& theta) {
      const double q = base.quadratic(theta);
      Point values(static_cast<Eigen::Index>(alphas.size()));
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        values[i] = alphas[i] == 1.0 ? q : std::pow(q, alphas[i]);
      }
      return values;
    };
    set.weighted_gradient = [base, alphas](const Point& theta,
                                           const WeightVector& w) {
      const Point r = theta.array() - base.shift;
      const double q = r.cwiseProduct(r).dot(base.h_diag);
      double outer = 0.0;
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (w[static_cast<Eigen::Index>(i)] == 0.0) continue;
        const double a = alphas[i];
        outer += w[static_cast<Eigen::Index>(i)] *
                 (a == 1.0 ? 1.0 : a * std::pow(q, a - 1.0));
      }
      return (2.0 * outer * base.h_diag.cwiseProduct(r)).eval();
    };
  }
  return set;
}

// ----------------------------------------------------------------------------

double gradient_check(const Objective& obj, const Point& x, double h) {
  if (h <= 0) throw UsageError("finite-difference step must be positive");
  const Point analytic = obj.gradient(x);
  double worst = 0.0;
  Point probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double fp = obj.value(probe);
    probe[j] = x[j] - h;
    const double fm = obj.value(probe);
    probe[j] = x[j];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("non-finite value during finite differences");
    }
    const double numeric = (fp - fm) / (2.0 * h);
    const double rel =
        std::abs(analytic[j] - numeric) / std::max(1.0, std::abs(numeric));
    worst = std::max(worst, rel);
  }
  return worst;
}

// ----------------------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'A', 'M', 'O', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), 4);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) throw UsageError("short write to '" + path + "'");
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "' for reading");
  char magic[4];
  std::uint32_t version = 0, rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw UsageError("'" + path + "' is not a dataset cache file");
  }
  if (version != kVersion) {
    throw UsageError("unsupported dataset cache version " +
                     std::to_string(version));
  }
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw UsageError("truncated dataset cache '" + path + "'");
  return m;
}

}  // namespace amoo
