#include "slpos/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

constexpr double kDistanceFloor = 1e-9;  // meters; Jacobian guard
constexpr double kMaxDamping = 1e12;
constexpr double kBearingConditionLimit = 1e8;

double guarded_distance(const Position& a, const Position& b) {
  return std::max(distance(a, b), kDistanceFloor);
}

int spatial_dims(Dimensionality dim) {
  return dim == Dimensionality::TwoD ? 2 : 3;
}

template <typename Problem>
double cost_at(const Problem& problem, const Position& x) {
  const int n = problem.residual_count();
  std::vector<double> r(n);
  problem.eval(x, Dimensionality::ThreeD, r.data(), nullptr);
  double cost = 0.0;
  for (double v : r) cost += v * v;
  return cost;
}

struct DescentResult {
  Position position;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

// One Levenberg-damped Gauss-Newton descent from a single starting point.
// Reports the best iterate with converged=false when damping escalation
// cannot make progress; throws GeometryError when the normal equations stay
// singular through the escalation.
template <typename Problem>
DescentResult descend(const Problem& problem, const Position& init,
                      const SolverSettings& settings, bool want_history) {
  const int dims = spatial_dims(settings.dimensionality);
  const int n = problem.residual_count();

  DescentResult result;
  result.position = init;
  result.cost = cost_at(problem, init);
  if (!std::isfinite(result.cost)) {
    throw GeometryError("non-finite residuals at the initial point");
  }
  if (want_history) result.history.push_back(result.cost);

  Eigen::MatrixXd jac(n, dims);
  Eigen::VectorXd res(n);
  std::vector<double> r_buf(n);
  std::vector<double> j_buf(static_cast<std::size_t>(n) * dims);

  Position x = init;
  double cost = result.cost;
  double lambda = settings.damping_initial;

  for (int iteration = 0;
       iteration < settings.max_iterations && !result.converged; ++iteration) {
    problem.eval(x, settings.dimensionality, r_buf.data(), j_buf.data());
    for (int i = 0; i < n; ++i) {
      res(i) = r_buf[i];
      for (int c = 0; c < dims; ++c) jac(i, c) = j_buf[i * dims + c];
    }
    if (!res.allFinite() || !jac.allFinite()) {
      throw GeometryError("non-finite residuals or Jacobian during iteration");
    }

    const Eigen::MatrixXd hessian = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * res;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = hessian;
      for (int c = 0; c < dims; ++c) damped(c, c) += lambda;
      const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        lambda *= 10.0;
        if (lambda > kMaxDamping) {
          throw GeometryError(
              "singular normal equations after damping escalation");
        }
        continue;
      }

      Position x_try = x;
      x_try.x += step(0);
      x_try.y += step(1);
      if (dims == 3) x_try.z += step(2);
      const double cost_try = cost_at(problem, x_try);

      // When the linearized model predicts a decrease below the floating
      // point resolution of the cost itself, the comparison carries no
      // information; take the (essentially Newton) step so the iterate can
      // settle onto the stationary point instead of escalating the damping.
      const double predicted_cost = (res + jac * step).squaredNorm();
      const bool below_resolution =
          cost - predicted_cost <=
          64.0 * std::numeric_limits<double>::epsilon() * cost;

      if (step.norm() <= settings.step_tolerance_m) {
        if (std::isfinite(cost_try) && cost_try <= cost) {
          x = x_try;
          cost = cost_try;
          ++result.iterations;
          if (want_history) result.history.push_back(cost);
        }
        result.converged = true;
        break;
      }
      if (std::isfinite(cost_try) && (cost_try < cost || below_resolution)) {
        x = x_try;
        cost = cost_try;
        ++result.iterations;
        if (want_history) result.history.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > kMaxDamping) {
          // no descent direction left at any damping: keep the best iterate
          result.position = x;
          result.cost = cost;
          return result;
        }
      }
    }
  }

  result.position = x;
  result.cost = cost;
  return result;
}

// Multilateration costs are bimodal for thin anchor geometries (the mirror
// fix across an almost-line of anchors). A descent from the primary init can
// settle in the wrong basin, so anchor-seeded restarts are tried and the
// lowest cost wins; cost ties go to the candidate nearest the primary init,
// which keeps the documented two-anchor ambiguity rule.
template <typename Problem>
PositionEstimate solve_gauss_newton(const Problem& problem,
                                    const Position& primary_init,
                                    std::span<const Position> restart_seeds,
                                    const SolverSettings& settings,
                                    EstimatorMethod method) {
  const int dims = spatial_dims(settings.dimensionality);
  const int n = problem.residual_count();
  if (n < dims) {
    throw GeometryError("underdetermined problem: fewer residuals than unknowns");
  }

  const bool want_history = settings.cost_history != nullptr;
  DescentResult best = descend(problem, primary_init, settings, want_history);

  // a numerically-zero residual is already the global minimum
  if (best.cost > 1e-16) {
    for (const Position& seed : restart_seeds) {
      Position init = seed;
      if (dims == 2) init.z = primary_init.z;
      DescentResult candidate;
      try {
        candidate = descend(problem, init, settings, want_history);
      } catch (const GeometryError&) {
        continue;  // a restart seed may sit on a singular point
      }
      const double tol = 1e-12 * (1.0 + best.cost);
      const bool better = candidate.cost < best.cost - tol;
      // ties matter only between exact-zero-residual basins (the ambiguous
      // critically-determined case), where the init-nearest one wins
      const bool ambiguous_tie = candidate.cost < 1e-16 && best.cost < 1e-16;
      if (better || (ambiguous_tie &&
                     distance(candidate.position, primary_init) <
                         distance(best.position, primary_init))) {
        best = std::move(candidate);
      }
    }
  }

  if (settings.cost_history) {
    settings.cost_history->insert(settings.cost_history->end(),
                                  best.history.begin(), best.history.end());
  }

  PositionEstimate estimate;
  estimate.method = method;
  estimate.ambiguous = (n == dims);
  estimate.position = best.position;
  estimate.iterations = best.iterations;
  estimate.converged = best.converged;
  estimate.final_residual_norm = std::sqrt(best.cost);
  return estimate;
}

Position centroid(std::span<const Position> points) {
  Position c;
  for (const Position& p : points) c = c + p;
  const double n = static_cast<double>(points.size());
  return {c.x / n, c.y / n, c.z / n};
}

}  // namespace

std::string to_string(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::RttMultilat: return "rtt-multilat";
    case EstimatorMethod::Tdoa: return "tdoa";
    case EstimatorMethod::AoaTriang: return "aoa-triang";
    case EstimatorMethod::HybridRttAoa: return "hybrid-rtt-aoa";
    case EstimatorMethod::BruteForce: return "brute-force";
  }
  throw UsageError("unknown estimator method");
}

void RangeProblem::eval(const Position& x, Dimensionality dim,
                        double* residuals, double* jacobian) const {
  const int dims = spatial_dims(dim);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const RangeObservation& obs = observations[i];
    const double d = guarded_distance(x, obs.anchor);
    residuals[i] = distance(x, obs.anchor) - obs.range_m;
    if (jacobian) {
      const Position u = x - obs.anchor;
      jacobian[i * dims + 0] = u.x / d;
      jacobian[i * dims + 1] = u.y / d;
      if (dims == 3) jacobian[i * dims + 2] = u.z / d;
    }
  }
}

void TdoaProblem::eval(const Position& x, Dimensionality dim,
                       double* residuals, double* jacobian) const {
  const int dims = spatial_dims(dim);
  const double d_ref = guarded_distance(x, ref_anchor);
  const Position u_ref = x - ref_anchor;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    const auto& [anchor, diff_m] = diffs[i];
    const double d = guarded_distance(x, anchor);
    residuals[i] = (distance(x, anchor) - distance(x, ref_anchor)) - diff_m;
    if (jacobian) {
      const Position u = x - anchor;
      jacobian[i * dims + 0] = u.x / d - u_ref.x / d_ref;
      jacobian[i * dims + 1] = u.y / d - u_ref.y / d_ref;
      if (dims == 3) jacobian[i * dims + 2] = u.z / d - u_ref.z / d_ref;
    }
  }
}

TdoaProblem make_tdoa_problem(const TdoaSet& tdoa,
                              std::span<const AnchorSite> anchors) {
  auto find = [&](NodeId id) -> const Position& {
    for (const AnchorSite& site : anchors) {
      if (site.id == id) return site.position;
    }
    throw UsageError("anchor position missing for tdoa solve");
  };
  TdoaProblem problem;
  problem.ref_anchor = find(tdoa.ref_anchor_id);
  for (const TdoaDiff& diff : tdoa.diffs) {
    problem.diffs.emplace_back(find(diff.anchor_id), diff.diff_m);
  }
  return problem;
}

std::function<double(const Position&)> range_cost(RangeProblem problem) {
  return [problem = std::move(problem)](const Position& x) {
    return cost_at(problem, x);
  };
}

std::function<double(const Position&)> tdoa_cost(TdoaProblem problem) {
  return [problem = std::move(problem)](const Position& x) {
    return cost_at(problem, x);
  };
}

PositionEstimate solve_range_multilateration(
    std::span<const RangeObservation> ranges, const SolverSettings& settings) {
  if (ranges.empty()) {
    throw GeometryError("no range observations");
  }
  RangeProblem problem;
  problem.observations.assign(ranges.begin(), ranges.end());

  std::vector<Position> anchors;
  anchors.reserve(ranges.size());
  for (const auto& obs : ranges) anchors.push_back(obs.anchor);

  Position init = settings.init_position;
  if (settings.init == InitStrategy::AnchorCentroid) {
    init = centroid(anchors);
  }
  return solve_gauss_newton(problem, init, anchors, settings,
                            EstimatorMethod::RttMultilat);
}

PositionEstimate solve_tdoa(const TdoaSet& tdoa,
                            std::span<const AnchorSite> anchors,
                            const SolverSettings& settings) {
  const TdoaProblem problem = make_tdoa_problem(tdoa, anchors);

  std::vector<Position> positions{problem.ref_anchor};
  for (const auto& [anchor, _] : problem.diffs) positions.push_back(anchor);

  Position init = settings.init_position;
  if (settings.init == InitStrategy::AnchorCentroid) {
    init = centroid(positions);
  }
  return solve_gauss_newton(problem, init, positions, settings,
                            EstimatorMethod::Tdoa);
}

PositionEstimate solve_aoa_triangulation(
    std::span<const BearingObservation> bearings,
    const SolverSettings& settings) {
  if (bearings.size() < 2) {
    throw GeometryError("bearing triangulation needs at least 2 bearings");
  }
  const int dims = spatial_dims(settings.dimensionality);

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dims, dims);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dims);

  auto add_row = [&](const Eigen::VectorXd& n_vec, const Eigen::VectorXd& o_vec,
                     double weight) {
    normal += weight * n_vec * n_vec.transpose();
    rhs += weight * n_vec * n_vec.dot(o_vec);
  };

  for (const BearingObservation& b : bearings) {
    const double w = 1.0 / std::max(b.std_rad * b.std_rad, 1e-18);
    Eigen::VectorXd o(dims);
    o(0) = b.observer.x;
    o(1) = b.observer.y;
    if (dims == 3) o(2) = b.observer.z;

    if (dims == 2) {
      Eigen::VectorXd n_vec(2);
      n_vec << -std::sin(b.azimuth_rad), std::cos(b.azimuth_rad);
      add_row(n_vec, o, w);
    } else {
      const double sz = std::sin(b.zenith_rad);
      Eigen::Vector3d u(std::cos(b.azimuth_rad) * sz,
                        std::sin(b.azimuth_rad) * sz, std::cos(b.zenith_rad));
      Eigen::Vector3d n1(-std::sin(b.azimuth_rad), std::cos(b.azimuth_rad), 0.0);
      Eigen::Vector3d n2 = u.cross(n1).normalized();
      add_row(n1, o, w);
      add_row(n2, o, w);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(normal);
  const double max_eig = eigs.eigenvalues().maxCoeff();
  const double min_eig = eigs.eigenvalues().minCoeff();
  if (!(min_eig > 0.0) || max_eig / min_eig > kBearingConditionLimit) {
    throw GeometryError("bearing lines are parallel or nearly parallel");
  }
  const Eigen::VectorXd solution = normal.ldlt().solve(rhs);

  PositionEstimate estimate;
  estimate.method = EstimatorMethod::AoaTriang;
  estimate.position.x = solution(0);
  estimate.position.y = solution(1);
  if (dims == 3) {
    estimate.position.z = solution(2);
  } else {
    double z_sum = 0.0;
    for (const BearingObservation& b : bearings) z_sum += b.observer.z;
    estimate.position.z = z_sum / static_cast<double>(bearings.size());
  }
  estimate.converged = true;
  estimate.iterations = 0;

  double ss = 0.0;
  for (const BearingObservation& b : bearings) {
    const double nx = -std::sin(b.azimuth_rad);
    const double ny = std::cos(b.azimuth_rad);
    const double r = nx * (estimate.position.x - b.observer.x) +
                     ny * (estimate.position.y - b.observer.y);
    ss += r * r;
  }
  estimate.final_residual_norm = std::sqrt(ss);
  return estimate;
}

PositionEstimate solve_hybrid_rtt_aoa(const RttMeasurement& range,
                                      const AoaMeasurement& bearing,
                                      const Node& anchor) {
  const double r = range.est_range_m;
  const double sz = std::sin(bearing.zenith_rad);
  PositionEstimate estimate;
  estimate.method = EstimatorMethod::HybridRttAoa;
  estimate.position = anchor.position +
                      r * Position{std::cos(bearing.azimuth_rad) * sz,
                                   std::sin(bearing.azimuth_rad) * sz,
                                   std::cos(bearing.zenith_rad)};
  estimate.converged = true;
  estimate.iterations = 0;
  estimate.final_residual_norm = 0.0;
  return estimate;
}

PositionEstimate brute_force(const std::function<double(const Position&)>& cost,
                             const GridBounds& bounds, double resolution_m) {
  if (!(resolution_m > 0.0)) {
    throw ConfigurationError("brute force resolution must be > 0");
  }
  if (!all_finite(bounds.lo) || !all_finite(bounds.hi)) {
    throw ConfigurationError("brute force bounds must be finite");
  }
  auto axis_steps = [&](double lo, double hi) -> long {
    if (hi < lo) throw ConfigurationError("brute force bounds inverted");
    return static_cast<long>(std::floor((hi - lo) / resolution_m + 1e-9)) + 1;
  };
  const long nx = axis_steps(bounds.lo.x, bounds.hi.x);
  const long ny = axis_steps(bounds.lo.y, bounds.hi.y);
  const long nz = axis_steps(bounds.lo.z, bounds.hi.z);
  if (nx * ny * nz > 100'000'000L) {
    throw ConfigurationError("brute force grid exceeds 1e8 cells");
  }

  Position best{};
  double best_cost = std::numeric_limits<double>::infinity();
  for (long iz = 0; iz < nz; ++iz) {
    const double z = bounds.lo.z + iz * resolution_m;
    for (long iy = 0; iy < ny; ++iy) {
      const double y = bounds.lo.y + iy * resolution_m;
      for (long ix = 0; ix < nx; ++ix) {
        const Position p{bounds.lo.x + ix * resolution_m, y, z};
        const double c = cost(p);
        if (c < best_cost) {
          best_cost = c;
          best = p;
        }
      }
    }
  }

  PositionEstimate estimate;
  estimate.method = EstimatorMethod::BruteForce;
  estimate.position = best;
  estimate.converged = true;
  estimate.iterations = 0;
  estimate.final_residual_norm = std::sqrt(std::max(best_cost, 0.0));
  return estimate;
}

}  // namespace slpos
