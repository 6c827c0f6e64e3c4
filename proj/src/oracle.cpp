#include "srsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srsim/errors.hpp"

namespace srsim {

namespace {

using Triplet = Eigen::Triplet<cd>;

SparseOp from_triplets(std::size_t dim, const std::vector<Triplet>& t) {
  SparseOp m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

bool is_pair_slot(std::size_t i) {
  return i >= slot(Field::P12_12) && i < slot(Field::X12_12);
}

}  // namespace

LindbladModel::LindbladModel(int n1, int n2, int cutoff) : n1_(n1), n2_(n2), cutoff_(cutoff) {
  if (n1 < 0 || n2 < 0 || n1 + n2 < 1 || cutoff < 1) {
    throw std::invalid_argument("oracle needs at least one atom and a Fock cutoff >= 1");
  }
  const int m = n1 + n2;
  if (m > 13) throw DimensionCap("too many atoms for the exact oracle");
  const std::size_t atom_dim = std::size_t{1} << m;
  dim_ = static_cast<std::size_t>(cutoff + 1) * atom_dim;
  if (dim_ > kOracleDimensionCap) {
    throw DimensionCap("oracle Hilbert dimension " + std::to_string(dim_) + " exceeds " +
                       std::to_string(kOracleDimensionCap));
  }

  std::vector<Triplet> ta;
  for (int n = 1; n <= cutoff; ++n) {
    for (std::size_t b = 0; b < atom_dim; ++b) {
      ta.emplace_back(static_cast<int>((n - 1) * atom_dim + b), static_cast<int>(n * atom_dim + b),
                      std::sqrt(static_cast<double>(n)));
    }
  }
  a_ = from_triplets(dim_, ta);
  ad_ = SparseOp(a_.adjoint());

  for (int j = 0; j < m; ++j) {
    std::vector<Triplet> lower, proj;
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      if (idx % atom_dim & bit) {
        lower.emplace_back(static_cast<int>(idx - bit), static_cast<int>(idx), 1.0);
        proj.emplace_back(static_cast<int>(idx), static_cast<int>(idx), 1.0);
      }
    }
    s12_.push_back(from_triplets(dim_, lower));
    s21_.push_back(SparseOp(s12_.back().adjoint()));
    s22_.push_back(from_triplets(dim_, proj));
  }
}

const SparseOp& LindbladModel::op(Op o) const {
  if (o.kind == OpKind::A) return a_;
  if (o.kind == OpKind::Ad) return ad_;
  if (o.atom < 0 || o.atom >= atoms(o.ens)) throw std::out_of_range("oracle: atom index out of range");
  const auto j = static_cast<std::size_t>(o.ens == 0 ? o.atom : n1_ + o.atom);
  switch (o.kind) {
    case OpKind::S12: return s12_[j];
    case OpKind::S21: return s21_[j];
    default: return s22_[j];
  }
}

DensityMatrix LindbladModel::ground_state() const {
  DensityMatrix rho = DensityMatrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  rho(0, 0) = 1.0;
  return rho;
}

LindbladModel::Generator::Generator(const LindbladModel& m, const SystemParams& p, const DriveSetting& d) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  SparseOp h = d.delta_c * (m.ad_ * m.a_);
  if (p.kappa > 0.0) jumps_.push_back(std::sqrt(p.kappa) * m.a_);
  for (int e = 0; e < 2; ++e) {
    const auto& ep = p.ens[e];
    for (int k = 0; k < m.atoms(e); ++k) {
      const SparseOp& lo = m.op(s12(e, k));
      const SparseOp& hi = m.op(s21(e, k));
      const SparseOp& pr = m.op(s22(e, k));
      h += d.delta[e] * pr;
      h += ep.g * (SparseOp(m.ad_ * lo) + SparseOp(hi * m.a_));
      h += d.omega[e] * (lo + hi);
      if (ep.gamma > 0.0) jumps_.push_back(std::sqrt(ep.gamma) * lo);
      if (ep.chi > 0.0) jumps_.push_back(std::sqrt(2.0 * ep.chi) * pr);
    }
  }
  SparseOp decay(n, n);
  for (const auto& l : jumps_) {
    jumps_adj_.push_back(SparseOp(l.adjoint()));
    decay += jumps_adj_.back() * l;
  }
  h_eff_ = h - cd(0.0, 0.5) * decay;
  h_eff_adj_ = SparseOp(h_eff_.adjoint());
}

DensityMatrix LindbladModel::Generator::apply(const DensityMatrix& rho) const {
  DensityMatrix out = cd(0.0, -1.0) * (h_eff_ * rho - rho * h_eff_adj_);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    out += (jumps_[k] * rho) * jumps_adj_[k];
  }
  return out;
}

cd DensityMoments::expect(const SparseOp& o) const {
  cd sum{};
  for (Eigen::Index c = 0; c < o.outerSize(); ++c) {
    for (SparseOp::InnerIterator it(o, c); it; ++it) sum += it.value() * rho_(it.col(), it.row());
  }
  return sum;
}

cd DensityMoments::first(Op x) const { return expect(m_.op(x)); }

cd DensityMoments::second(Op x, Op y) const { return expect(SparseOp(m_.op(x) * m_.op(y))); }

cd DensityMoments::third(Op x, Op y, Op z) const {
  return expect(SparseOp(SparseOp(m_.op(x) * m_.op(y)) * m_.op(z)));
}

MeanFieldState symmetrized_moments(const LindbladModel& m, const DensityMatrix& rho) {
  const DensityMoments dm(m, rho);
  MeanFieldState s;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto so = slot_operators(i);
    if (so.count == 1) {
      const Op o = so.ops[0];
      if (o.is_cavity()) {
        s[i] = dm.first(o);
        continue;
      }
      cd sum{};
      for (int k = 0; k < m.atoms(o.ens); ++k) sum += dm.first({o.kind, o.ens, k});
      s[i] = m.atoms(o.ens) > 0 ? sum / static_cast<double>(m.atoms(o.ens)) : cd{};
      continue;
    }
    Op x = so.ops[0], y = so.ops[1];
    cd sum{};
    int count = 0;
    const int nx = x.is_cavity() ? 1 : m.atoms(x.ens);
    const int ny = y.is_cavity() ? 1 : m.atoms(y.ens);
    for (int j = 0; j < nx; ++j) {
      for (int k = 0; k < ny; ++k) {
        if (!x.is_cavity() && !y.is_cavity() && x.ens == y.ens && j == k) continue;
        Op xx = x, yy = y;
        if (!xx.is_cavity()) xx.atom = j;
        if (!yy.is_cavity()) yy.atom = k;
        sum += dm.second(xx, yy);
        ++count;
      }
    }
    s[i] = count > 0 ? sum / static_cast<double>(count) : cd{};
  }
  return s;
}

OracleTrajectory exact_evolve(const OracleConfig& cfg) {
  const LindbladModel model(cfg.n1, cfg.n2, cfg.fock_cutoff);
  cfg.protocol.validate();
  const auto dim = static_cast<Eigen::Index>(model.dim());

  // Sample grids per segment, and the global indices of the positivity spot checks.
  std::vector<std::vector<double>> grids;
  std::size_t total = 0;
  {
    double t = 0.0;
    for (std::size_t k = 0; k < cfg.protocol.segments.size(); ++k) {
      const double t_end = k + 1 == cfg.protocol.segments.size() ? cfg.protocol.duration()
                                                                 : t + cfg.protocol.segments[k].duration;
      grids.push_back(aligned_grid(t, t_end, cfg.sample_dt));
      total += grids.back().size() - (k > 0 ? 1 : 0);
      t = t_end;
    }
  }
  std::vector<std::size_t> spot;
  for (std::size_t i = 0; i < 5; ++i) spot.push_back(i * (total - 1) / 4);

  OracleTrajectory out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  const DensityMatrix rho0 = model.ground_state();
  std::vector<double> y(reinterpret_cast<const double*>(rho0.data()),
                        reinterpret_cast<const double*>(rho0.data()) + 2 * dim * dim);

  double t = 0.0;
  for (std::size_t k = 0; k < cfg.protocol.segments.size(); ++k) {
    const auto& seg = cfg.protocol.segments[k];
    const auto& grid = grids[k];
    const LindbladModel::Generator gen(model, cfg.params, seg.drive);
    RhsFunction f = [&](double, std::span<const double> yy, std::span<double> dy) {
      const Eigen::Map<const DensityMatrix> rho(reinterpret_cast<const cd*>(yy.data()), dim, dim);
      Eigen::Map<DensityMatrix> d(reinterpret_cast<cd*>(dy.data()), dim, dim);
      d = gen.apply(rho);
    };
    bool first = true;
    integrate_samples(f, y, t, grid.back(), cfg.integrator, grid, [&](double ts, std::span<const double> yy) {
      if (first && k > 0) {
        first = false;
        return;
      }
      first = false;
      const Eigen::Map<const DensityMatrix> rho(reinterpret_cast<const cd*>(yy.data()), dim, dim);
      const double trace_err = std::abs(rho.trace() - 1.0);
      const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
      out.max_trace_error = std::max(out.max_trace_error, trace_err);
      out.max_hermiticity_error = std::max(out.max_hermiticity_error, herm_err);
      if (trace_err > cfg.trace_tol) {
        throw TraceDrift("oracle trace drifted by " + std::to_string(trace_err) + " at t=" + std::to_string(ts));
      }
      if (herm_err > cfg.trace_tol) {
        throw HermiticityViolation("oracle density matrix lost Hermiticity at t=" + std::to_string(ts));
      }
      if (std::find(spot.begin(), spot.end(), out.times.size()) != spot.end()) {
        const DensityMatrix h = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<DensityMatrix> es(h, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        out.min_eigenvalue = std::min(out.min_eigenvalue, lo);
        if (lo < -cfg.trace_tol) {
          throw NumericError("oracle density matrix has eigenvalue " + std::to_string(lo));
        }
      }
      out.times.push_back(ts);
      out.states.push_back(symmetrized_moments(model, DensityMatrix(rho)));
    });
    t = grid.back();
  }

  if (cfg.check_cutoff) {
    OracleConfig finer = cfg;
    finer.fock_cutoff += 2;
    finer.check_cutoff = false;
    const auto ref = exact_evolve(finer);
    const auto& a = out.states.back();
    const auto& b = ref.states.back();
    for (std::size_t i = 0; i < kFieldCount; ++i) {
      const double d = std::abs(a[i] - b[i]);
      out.cutoff_endpoint_change = std::max(out.cutoff_endpoint_change, d);
      if (d > cfg.cutoff_tol * std::max(1.0, std::abs(b[i]))) {
        throw CutoffInadequate("Fock cutoff " + std::to_string(cfg.fock_cutoff) + " too small: field " +
                               std::string(slot_name(i)) + " moved by " + std::to_string(d));
      }
    }
  }
  return out;
}

ComparisonReport compare_meanfield(const OracleConfig& cfg, double tolerance, double floor) {
  if (cfg.n1 < 1 || cfg.n2 < 1) throw std::invalid_argument("comparison needs at least one atom per ensemble");
  ComparisonReport rep;
  rep.tolerance = tolerance;
  rep.floor = floor;
  rep.exact = exact_evolve(cfg);

  SystemParams p = cfg.params;
  p.ens[0].n_atoms = cfg.n1;
  p.ens[1].n_atoms = cfg.n2;
  RunSettings run;
  run.integrator = cfg.integrator;
  run.sample_dt = cfg.sample_dt;
  rep.meanfield = run_protocol(p, cfg.protocol, run).trajectory;
  const auto& ex = rep.exact;
  const auto& mf = rep.meanfield;
  if (ex.times.size() != mf.times.size()) throw std::logic_error("oracle and mean-field grids differ");

  for (std::size_t i = 0; i < kFieldCount; ++i) {
    FieldComparison fc;
    fc.name = std::string(slot_name(i));
    const int e = slot_ensemble(i);
    fc.skipped = is_pair_slot(i) && (e == 0 ? cfg.n1 : cfg.n2) < 2;
    if (!fc.skipped) {
      for (std::size_t k = 0; k < ex.times.size(); ++k) {
        fc.peak_exact = std::max(fc.peak_exact, std::abs(ex.states[k][i]));
        fc.max_abs_error = std::max(fc.max_abs_error, std::abs(mf.states[k][i] - ex.states[k][i]));
      }
      const double allowed = tolerance * fc.peak_exact + floor;
      for (std::size_t k = 0; k < ex.times.size(); ++k) {
        if (std::abs(mf.states[k][i] - ex.states[k][i]) > allowed) {
          fc.first_divergence = ex.times[k];
          break;
        }
      }
      fc.rel_error = fc.max_abs_error / std::max(fc.peak_exact, floor);
      fc.pass = fc.max_abs_error <= allowed;
      if (fc.peak_exact > floor) rep.max_rel_error = std::max(rep.max_rel_error, fc.rel_error);
      if (!fc.pass) {
        rep.pass = false;
        if (rep.first_divergence < 0.0 || fc.first_divergence < rep.first_divergence) {
          rep.first_divergence = fc.first_divergence;
        }
      }
    }
    rep.fields.push_back(fc);
  }
  return rep;
}

}  // namespace srsim
