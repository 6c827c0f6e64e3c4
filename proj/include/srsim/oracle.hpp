#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "srsim/integrator.hpp"
#include "srsim/params.hpp"
#include "srsim/protocol.hpp"
#include "srsim/state.hpp"

namespace srsim {

using SparseOp = Eigen::SparseMatrix<cd>;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr std::size_t kOracleDimensionCap = std::size_t{1} << 14;

/// Exact master-equation model of n1 + n2 two-level atoms and one cavity mode
/// truncated at `cutoff` photons. Basis: |n> (x) |atom 0> (x) ... with |g> = 0,
/// |e> = 1; ensemble 1 holds atoms 0..n1-1, ensemble 2 the rest.
class LindbladModel {
 public:
  LindbladModel(int n1, int n2, int cutoff);

  std::size_t dim() const { return dim_; }
  int atoms(int ens) const { return ens == 0 ? n1_ : n2_; }
  int cutoff() const { return cutoff_; }

  /// Matrix of a single-subsystem operator; Op::atom indexes within the ensemble.
  const SparseOp& op(Op o) const;

  /// Density-matrix time derivative for one drive setting.
  class Generator {
   public:
    Generator(const LindbladModel& m, const SystemParams& p, const DriveSetting& d);
    DensityMatrix apply(const DensityMatrix& rho) const;

   private:
    SparseOp h_eff_, h_eff_adj_;
    std::vector<SparseOp> jumps_, jumps_adj_;
  };

  /// Vacuum cavity, all atoms in the ground state.
  DensityMatrix ground_state() const;

 private:
  int n1_, n2_, cutoff_;
  std::size_t dim_;
  SparseOp a_, ad_;
  std::vector<SparseOp> s12_, s21_, s22_;  // per global atom index
};

/// Exact moments Tr(rho X Y Z) in the same provider interface as the closure,
/// so the mean-field equations can be evaluated on an exact state. Operators
/// on the same atom are multiplied as matrices.
class DensityMoments {
 public:
  DensityMoments(const LindbladModel& m, const DensityMatrix& rho) : m_(m), rho_(rho) {}

  cd first(Op x) const;
  cd second(Op x, Op y) const;
  cd third(Op x, Op y, Op z) const;
  cd expect(const SparseOp& o) const;

 private:
  const LindbladModel& m_;
  const DensityMatrix& rho_;
};

/// Every stored mean-field quantity evaluated exactly, averaged over the atom
/// labels of each ensemble. Pair fields of an ensemble with fewer than two
/// atoms are 0.
MeanFieldState symmetrized_moments(const LindbladModel& m, const DensityMatrix& rho);

struct OracleConfig {
  int n1 = 1;
  int n2 = 1;
  int fock_cutoff = 6;
  SystemParams params;  // n_atoms is ignored
  Protocol protocol;
  IntegratorConfig integrator{1e-10, 1e-13};
  double sample_dt = 1e-9;
  double trace_tol = 1e-8;
  double cutoff_tol = 1e-6;
  bool check_cutoff = true;  // rerun at fock_cutoff + 2 and compare endpoints
};

struct OracleTrajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;  // over the spot-checked samples
  double cutoff_endpoint_change = 0.0;
};

/// Throws DimensionCap, TraceDrift, HermiticityViolation, CutoffInadequate,
/// NumericError (negative eigenvalue) or integrator errors.
OracleTrajectory exact_evolve(const OracleConfig& config);

struct FieldComparison {
  std::string name;
  double max_abs_error = 0.0;
  double peak_exact = 0.0;
  double rel_error = 0.0;  // max_abs_error / max(peak_exact, floor)
  double first_divergence = -1.0;  // s; -1 when never above tolerance
  bool skipped = false;  // undefined for this atom number
  bool pass = true;
};

struct ComparisonReport {
  double tolerance = 0.0;
  double floor = 0.0;
  std::vector<FieldComparison> fields;
  double max_rel_error = 0.0;
  double first_divergence = -1.0;
  bool pass = true;
  OracleTrajectory exact;
  Trajectory meanfield;
};

/// Runs the protocol through the exact oracle and the closed mean-field
/// equations with N_a = n_a, and compares every stored field on the shared
/// sample grid. A field passes when max_t |mf - exact| <= tol * max_t |exact| + floor.
/// Requires n1, n2 >= 1.
ComparisonReport compare_meanfield(const OracleConfig& config, double tolerance = 0.02,
                                   double floor = 1e-8);

}  // namespace srsim
