#pragma once

#include <array>
#include <functional>
#include <vector>

#include "micromorph/assembly.hpp"
#include "micromorph/extension.hpp"
#include "micromorph/solvers.hpp"

namespace micromorph {

using TimeVectorField = std::function<Vec3(const Vec3&, double)>;
using TimeMatrixField = std::function<Mat3(const Vec3&, double)>;

/// Time-dependent boundary data: Dirichlet data with two analytic time
/// derivatives, and tangential data for P given either as zero, as the
/// coupling (grad g)_i x n, or as the trace of an explicit tensor field.
struct BoundaryConditions {
  enum class Tangential { zero, coupling, tensor };

  DirichletData dirichlet;                  // empty means zero
  Tangential tangential = Tangential::zero;
  TimeMatrixField q, q_t, q_tt;             // used when tangential == tensor

  bool homogeneous() const { return dirichlet.empty() && tangential == Tangential::zero; }

  /// Dirichlet samples as a spatial field at fixed time (zero when unset).
  VectorField g_at(double t) const;
  VectorField g_t_at(double t) const;
  VectorField g_tt_at(double t) const;

  /// Tangential rows at fixed time (and time derivatives).
  std::array<TangentialTraceData, 3> tangential_at(const Mesh& mesh, double t) const;
  std::array<TangentialTraceData, 3> tangential_t_at(const Mesh& mesh, double t) const;
  std::array<TangentialTraceData, 3> tangential_tt_at(const Mesh& mesh, double t) const;
};

/// Positions and velocities of (u, P) at t = 0.
struct InitialData {
  Eigen::VectorXd u0, u1;
  std::array<Eigen::VectorXd, 3> p0, p1;

  static InitialData zero(const H1VectorSpace& vu, const HcurlSpace& vp);
};

enum class Integrator { implicit_midpoint, newmark };

struct DynamicRun {
  MaterialParams params;
  TimeVectorField body_force;   // F(x, t); null means zero
  TimeMatrixField body_moment;  // M(x, t)
  BoundaryConditions boundary;
  InitialData init;
  double t_end = 1.0;
  double dt = 0.01;
  Integrator integrator = Integrator::implicit_midpoint;
  int output_every = 1;
  SolveOptions solve;
};

/// Per-condition maximum boundary mismatch of the initial data against the
/// boundary data at t = 0 (Dirichlet positions/velocities, tangential
/// positions/velocities).
struct CompatibilityReport {
  double u0_mismatch = 0.0;
  double u1_mismatch = 0.0;
  double p0_mismatch = 0.0;
  double p1_mismatch = 0.0;
  double tolerance = 1e-10;

  double max_mismatch() const;
  bool pass() const { return max_mismatch() < tolerance; }
};

CompatibilityReport check_compatibility(const InitialData& init, const BoundaryConditions& bc,
                                        const H1VectorSpace& vu, const HcurlSpace& vp,
                                        double tolerance = 1e-10);

/// Kinetic energy, the six contributions of the potential I(grad u, P), and
/// their totals.
struct EnergyRecord {
  double time = 0.0;
  double kinetic = 0.0;
  double pot_e_sym = 0.0;      // mu_e || sym(grad u - P) ||^2
  double pot_c_skew = 0.0;     // mu_c || skew(grad u - P) ||^2
  double pot_e_tr = 0.0;       // lambda_e/2 tr(grad u - P)^2
  double pot_micro_sym = 0.0;  // mu_micro || sym P ||^2
  double pot_micro_tr = 0.0;   // lambda_micro/2 tr(P)^2
  double pot_curl = 0.0;       // mu_macro L_c^2 / 2 || Curl P ||^2

  double potential() const {
    return pot_e_sym + pot_c_skew + pot_e_tr + pot_micro_sym + pot_micro_tr + pot_curl;
  }
  double total() const { return kinetic + potential(); }
};

struct MicromorphicState {
  Eigen::VectorXd u, u_t;
  std::array<Eigen::VectorXd, 3> p, p_t;
};

EnergyRecord energy(const MicromorphicState& state, const MaterialParams& params,
                    const H1VectorSpace& vu, const HcurlSpace& vp, double time = 0.0);

struct TrajectorySample {
  double time = 0.0;
  int step = 0;
  MicromorphicState state;
};

struct DynamicResult {
  std::vector<EnergyRecord> energies;      // at output steps
  std::vector<TrajectorySample> samples;   // physical states at output steps
  MicromorphicState final_state;
  int steps = 0;
};

/// Integrate M xdd + K x = b(t) for the lifted unknown, reconstructing the
/// physical state (u, P) = lifted unknown + boundary lift at every output.
/// Refuses to run when the compatibility check fails.
DynamicResult run_dynamic(const DynamicRun& run, const H1VectorSpace& vu, const HcurlSpace& vp);

}  // namespace micromorph
