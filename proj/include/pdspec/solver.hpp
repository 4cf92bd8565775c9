// Penalized right-hand side, explicit-Euler stability bound, and the forward
// time-stepping loop.
#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <utility>

#include "problems.hpp"

namespace pdspec {

struct SolverConfig {
  double nu = 0.2;
  double eps = 5e-4;
  std::optional<double> dt;  // absent: dt_safety * stable_dt(...)
  double dt_safety = 0.9;
  double t_max = 15.0;
  std::vector<double> snapshot_times;
  bool record_error = false;
};

enum class TerminationStatus { Completed, Diverged };

struct Snapshot {
  double requested_t = 0.0;
  double t = 0.0;
  Field y;
};

struct SolveTimings {
  double setup_s = 0.0;
  double step_s = 0.0;
  double constraint_s = 0.0;
  double total_s = 0.0;
};

struct SolveResult {
  std::vector<Snapshot> snapshots;
  std::vector<std::pair<double, double>> error_series;  // (t, max rel error over Omega)
  Field final_y;
  double final_t = 0.0;
  double max_rel_error = 0.0;
  double max_rel_error_time = 0.0;
  SolveTimings timings;
  TerminationStatus status = TerminationStatus::Completed;
  double dt = 0.0;
  double beta = 0.0;
  double u0_norm = 0.0;
  long steps = 0;
};

/// Stability bound for forward Euler on the penalized equation:
/// dt <= 2 / (1/eps + 2 nu beta), times a safety factor. The bound is
/// derived for zero constraint/source data; the safety factor covers the
/// gap for nonzero data.
inline double stable_dt(double nu, double beta, double eps, double safety = 1.0) {
  if (!(nu > 0.0) || !(beta > 0.0) || !(eps > 0.0) || !(safety > 0.0))
    throw std::invalid_argument("stable_dt: all parameters must be positive");
  return safety * 2.0 / (1.0 / eps + 2.0 * nu * beta);
}

/// dy_i/dt = nu (L y)_i + f_i - (chi_i / eps) (y_i - y_Gamma_i).
inline Field penalized_rhs(const Field& y, const ConstraintField& y_gamma, const Field& f,
                           const MaskField& chi, double nu, double eps,
                           const SpectralOperator& op) {
  const Field lap = op.apply(y);
  Field rhs(y.grid);
  for (int i = 0; i < y.size(); ++i)
    rhs[i] = nu * lap[i] + f[i] - chi.chi[i] / eps * (y[i] - y_gamma.values[i]);
  return rhs;
}

struct SolveState {
  long step = 0;
  double t = 0.0;
  Field y;
  ConstraintField y_gamma;
  Field f;
};

/// One solve instance: owns the spectral operator, the mask, the cached
/// source/exact profiles and the step buffers. A single solve is sequential;
/// run independent Solver instances for concurrent parameter sweeps.
class Solver {
 public:
  static constexpr double kDivergenceThreshold = 1e12;

  Solver(ManufacturedProblem problem, DomainLayout layout, PeriodicGrid grid, KernelSpec kernel,
         SolverConfig config)
      : problem_(std::move(problem)),
        layout_(layout),
        grid_(grid),
        cfg_(std::move(config)),
        mask_(build_mask(layout, grid)),
        op_(kernel, grid),
        ws_(op_.make_workspace()) {
    if (!(cfg_.nu > 0.0) || !(cfg_.eps > 0.0))
      throw std::invalid_argument("Solver: nu and eps must be positive");
    if (cfg_.t_max < 0.0) throw std::invalid_argument("Solver: t_max must be nonnegative");
    const double bound = stable_dt(cfg_.nu, op_.beta(), cfg_.eps, 1.0);
    dt_ = cfg_.dt.value_or(cfg_.dt_safety * bound);
    if (!(dt_ > 0.0)) throw std::invalid_argument("Solver: dt must be positive");

    source_profile_.assign(grid_.n, 0.0);
    if (problem_.source_profile)
      for (int i = 0; i < grid_.n; ++i) source_profile_[i] = problem_.source_profile(grid_.x(i));
    if (problem_.has_exact) {
      exact_base_.resize(grid_.n);
      exact_profile_.resize(grid_.n);
      for (int i = 0; i < grid_.n; ++i) {
        exact_base_[i] = problem_.exact_base(grid_.x(i));
        exact_profile_[i] = problem_.exact_profile(grid_.x(i));
      }
      u0_norm_ = initial_sup_norm(problem_, layout_);
    }
    lap_buf_.resize(grid_.n);
    next_buf_.resize(grid_.n);
  }

  double dt() const { return dt_; }
  double beta() const { return op_.beta(); }
  double u0_norm() const { return u0_norm_; }
  const MaskField& mask() const { return mask_; }
  const SpectralOperator& op() const { return op_; }

  /// Initial condition sampled on all of the periodic domain, source at t=0,
  /// constraints assembled from the sampled field.
  SolveState initial_state() const {
    SolveState s;
    s.y = Field::sample(grid_, problem_.initial);
    s.f = Field(grid_);
    for (int i = 0; i < grid_.n; ++i) s.f[i] = source_profile_[i];
    s.y_gamma = assemble_constraints(s.y, layout_, mask_, problem_.bcs, 0.0);
    return s;
  }

  /// One forward-Euler step, then source and constraints at the new time.
  /// Returns false (state untouched) when the update leaves the finite range
  /// or crosses the divergence threshold.
  bool step(SolveState& s) {
    op_.apply(s.y.values, lap_buf_, ws_);
    double max_abs = 0.0;
    for (int i = 0; i < grid_.n; ++i) {
      const double rhs = cfg_.nu * lap_buf_[i] + s.f[i] -
                         mask_.chi[i] / cfg_.eps * (s.y[i] - s.y_gamma.values[i]);
      const double v = s.y[i] + dt_ * rhs;
      next_buf_[i] = v;
      max_abs = std::max(max_abs, std::abs(v));
    }
    if (!(max_abs <= kDivergenceThreshold)) return false;  // catches NaN too

    s.y.values.swap(next_buf_);
    s.step += 1;
    s.t = static_cast<double>(s.step) * dt_;
    const double decay = std::exp(-problem_.source_decay_rate * s.t);
    for (int i = 0; i < grid_.n; ++i) s.f[i] = source_profile_[i] * decay;
    const auto c0 = std::chrono::steady_clock::now();
    s.y_gamma = assemble_constraints(s.y, layout_, mask_, problem_.bcs, s.t);
    constraint_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    return true;
  }

  SolveResult run() {
    const auto t_start = std::chrono::steady_clock::now();
    constraint_seconds_ = 0.0;

    SolveResult result;
    result.dt = dt_;
    result.beta = op_.beta();
    result.u0_norm = u0_norm_;

    SolveState state = initial_state();
    const long n_steps =
        cfg_.t_max > 0.0 ? static_cast<long>(std::ceil(cfg_.t_max / dt_ - 1e-9)) : 0;

    // Snapshot times round to the nearest completed step.
    std::vector<std::pair<long, double>> snaps;  // (step, requested time)
    for (double t_req : cfg_.snapshot_times) {
      long s = std::lround(t_req / dt_);
      s = std::clamp(s, 0L, n_steps);
      snaps.emplace_back(s, t_req);
    }
    std::sort(snaps.begin(), snaps.end());
    size_t next_snap = 0;

    const bool record = cfg_.record_error && problem_.has_exact;
    auto record_state = [&](const SolveState& s) {
      while (next_snap < snaps.size() && snaps[next_snap].first == s.step) {
        result.snapshots.push_back(Snapshot{snaps[next_snap].second, s.t, s.y});
        ++next_snap;
      }
      if (record) {
        const double err = max_error_against_exact(s);
        result.error_series.emplace_back(s.t, err);
        if (err > result.max_rel_error) {
          result.max_rel_error = err;
          result.max_rel_error_time = s.t;
        }
      }
    };

    const auto t_setup = std::chrono::steady_clock::now();
    result.timings.setup_s = std::chrono::duration<double>(t_setup - t_start).count();

    record_state(state);
    result.status = TerminationStatus::Completed;
    for (long k = 0; k < n_steps; ++k) {
      if (!step(state)) {
        result.status = TerminationStatus::Diverged;
        break;
      }
      record_state(state);
    }

    result.steps = state.step;
    result.final_t = state.t;
    result.final_y = std::move(state.y);

    const auto t_end = std::chrono::steady_clock::now();
    result.timings.constraint_s = constraint_seconds_;
    result.timings.step_s =
        std::chrono::duration<double>(t_end - t_setup).count() - constraint_seconds_;
    result.timings.total_s = std::chrono::duration<double>(t_end - t_start).count();
    return result;
  }

  /// Max over Omega of |y_i - exact(x_i, t)| / ||u0||_inf.
  double max_error_against_exact(const SolveState& s) const {
    const double decay = std::exp(-problem_.nu * s.t);
    double worst = 0.0;
    for (int i = 0; i < grid_.n; ++i) {
      if (!mask_.in_omega(i)) continue;
      const double exact = exact_base_[i] + decay * exact_profile_[i];
      worst = std::max(worst, std::abs(s.y[i] - exact));
    }
    return worst / u0_norm_;
  }

 private:
  ManufacturedProblem problem_;
  DomainLayout layout_;
  PeriodicGrid grid_;
  SolverConfig cfg_;
  MaskField mask_;
  SpectralOperator op_;
  SpectralOperator::Workspace ws_;
  double dt_ = 0.0;
  double u0_norm_ = 0.0;
  double constraint_seconds_ = 0.0;
  std::vector<double> source_profile_, exact_base_, exact_profile_;
  std::vector<double> lap_buf_, next_buf_;
};

inline SolveResult solve(const ManufacturedProblem& problem, const DomainLayout& layout,
                         const PeriodicGrid& grid, const KernelSpec& kernel,
                         const SolverConfig& config) {
  Solver solver(problem, layout, grid, kernel, config);
  return solver.run();
}

}  // namespace pdspec
