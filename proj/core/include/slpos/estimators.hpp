#pragma once

#include <functional>
#include <span>
#include <vector>

#include "slpos/geometry.hpp"
#include "slpos/measurement.hpp"
#include "slpos/scenario.hpp"

namespace slpos {

enum class EstimatorMethod { RttMultilat, Tdoa, AoaTriang, HybridRttAoa, BruteForce };

std::string to_string(EstimatorMethod method);

enum class InitStrategy { AnchorCentroid, Provided };

struct SolverSettings {
  int max_iterations = 100;
  double step_tolerance_m = 1e-6;
  double damping_initial = 1e-3;  // adaptive x10 / /10
  InitStrategy init = InitStrategy::AnchorCentroid;
  Position init_position;  // used when init == Provided
  Dimensionality dimensionality = Dimensionality::TwoD;
  // Diagnostic sink: accepted-step costs, in order. Optional.
  std::vector<double>* cost_history = nullptr;
};

struct PositionEstimate {
  Position position;
  EstimatorMethod method = EstimatorMethod::RttMultilat;
  int iterations = 0;
  bool converged = false;
  double final_residual_norm = 0.0;  // meters
  // Critically determined fixes (two ranges in 2-D) settle on whichever of
  // the two intersections is nearer the init.
  bool ambiguous = false;
};

struct RangeObservation {
  Position anchor;
  double range_m = 0.0;
};

struct BearingObservation {
  Position observer;
  double azimuth_rad = 0.0;
  double zenith_rad = 1.5707963267948966;  // pi/2: coplanar default
  double std_rad = 1.0;
};

struct AnchorSite {
  NodeId id = 0;
  Position position;
};

// Residual stacks shared by the damped Gauss-Newton core, the brute-force
// oracle and the Jacobian tests. eval() fills residuals (meters) and, when
// jacobian is non-null, the row-major n x dim analytic Jacobian.
struct RangeProblem {
  std::vector<RangeObservation> observations;
  int residual_count() const { return static_cast<int>(observations.size()); }
  void eval(const Position& x, Dimensionality dim, double* residuals,
            double* jacobian) const;
};

struct TdoaProblem {
  Position ref_anchor;
  // (anchor position, measured range difference to the reference) pairs.
  std::vector<std::pair<Position, double>> diffs;
  int residual_count() const { return static_cast<int>(diffs.size()); }
  void eval(const Position& x, Dimensionality dim, double* residuals,
            double* jacobian) const;
};

TdoaProblem make_tdoa_problem(const TdoaSet& tdoa,
                              std::span<const AnchorSite> anchors);

// Sum-of-squares cost the solvers minimize, usable with brute_force().
// Residuals use full 3-D distances; dimensionality only constrains which
// coordinates a solver may move.
std::function<double(const Position&)> range_cost(RangeProblem problem);
std::function<double(const Position&)> tdoa_cost(TdoaProblem problem);

// Damped Gauss-Newton over sum((|x - a_i| - r_i)^2). Non-convergence returns
// the best iterate with converged = false; structurally singular problems
// throw GeometryError.
PositionEstimate solve_range_multilateration(
    std::span<const RangeObservation> ranges, const SolverSettings& settings = {});

// Damped Gauss-Newton over the hyperbolic residuals
// (|x - a_i| - |x - a_ref|) - diff_i with exact analytic Jacobians.
PositionEstimate solve_tdoa(const TdoaSet& tdoa,
                            std::span<const AnchorSite> anchors,
                            const SolverSettings& settings = {});

// Weighted least-squares intersection of bearing lines (weights 1/std^2);
// closed-form linear solve, zenith rows added in 3-D.
PositionEstimate solve_aoa_triangulation(
    std::span<const BearingObservation> bearings,
    const SolverSettings& settings = {});

// Closed-form polar-to-Cartesian fix from a single anchor with both a range
// and a bearing.
PositionEstimate solve_hybrid_rtt_aoa(const RttMeasurement& range,
                                      const AoaMeasurement& bearing,
                                      const Node& anchor);

struct GridBounds {
  Position lo;
  Position hi;
};

// Exhaustive grid minimizer, the test oracle for the iterative solvers.
// Degenerate axes (lo == hi) collapse to a lower-dimensional search. Grids
// beyond 1e8 cells are rejected with ConfigurationError.
PositionEstimate brute_force(const std::function<double(const Position&)>& cost,
                             const GridBounds& bounds, double resolution_m);

}  // namespace slpos
