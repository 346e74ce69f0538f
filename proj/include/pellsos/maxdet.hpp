#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pellsos/measures.hpp"
#include "pellsos/moments.hpp"

namespace pellsos {

/// One nonzero of a basis matrix A_{g,alpha}: entry (row, col) receives
/// coeff * phi[var].
struct BlockEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t var = 0;
  double coeff = 0.0;
};

/// M_{t - t_g}(g.phi) = sum_alpha phi_alpha A_{g,alpha}, stored entrywise.
struct LmiBlock {
  std::size_t generator = 0;
  std::string label;
  int order = 0;
  std::vector<MultiIndex> basis;
  std::vector<BlockEntry> entries;

  std::size_t size() const noexcept { return basis.size(); }
};

/// The log-det program of order t on a generator set. Decision variables are
/// phi_alpha for 0 < |alpha| <= 2t; phi_0 is pinned to 1.
struct Instance {
  GeneratorSet set;
  int t = 0;
  MonomialIndex index;
  std::vector<LmiBlock> blocks;

  std::size_t num_variables() const noexcept { return index.size() - 1; }

  Eigen::MatrixXd block_matrix(std::size_t b, const Eigen::VectorXd& phi) const {
    const LmiBlock& blk = blocks.at(b);
    const auto k = static_cast<Eigen::Index>(blk.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (const auto& e : blk.entries)
      m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.coeff * phi(static_cast<Eigen::Index>(e.var));
    return m;
  }

  /// A_{g,alpha} for one block and one moment position.
  Eigen::MatrixXd basis_matrix(std::size_t b, std::size_t var) const {
    const LmiBlock& blk = blocks.at(b);
    const auto k = static_cast<Eigen::Index>(blk.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (const auto& e : blk.entries)
      if (e.var == var) m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.coeff;
    return m;
  }

  Eigen::VectorXd to_vector(const MomentSequence<double>& phi) const {
    if (phi.dim() != set.dim() || phi.order() < 2 * t)
      throw DimensionMismatch("moment sequence does not cover the instance");
    Eigen::VectorXd x(static_cast<Eigen::Index>(index.size()));
    for (std::size_t i = 0; i < index.size(); ++i) x(static_cast<Eigen::Index>(i)) = phi.values()[i];
    return x;
  }

  MomentSequence<double> to_sequence(const Eigen::VectorXd& x) const {
    MomentSequence<double> phi(set.dim(), 2 * t);
    for (std::size_t i = 0; i < index.size(); ++i) phi.values()[i] = x(static_cast<Eigen::Index>(i));
    return phi;
  }
};

inline Instance assemble_instance(const GeneratorSet& set, int t) {
  if (t < 1) throw InvalidArgument("order t must be at least 1");
  const auto active = set.active(t);
  if (active.size() < 2)
    throw InvalidArgument("order t = " + std::to_string(t) + " is too small for every generator of '" +
                          set.name() + "'");
  Instance inst{set, t, MonomialIndex(set.dim(), 2 * t), {}};
  for (std::size_t g : active) {
    LmiBlock blk;
    blk.generator = g;
    blk.label = set.labels()[g];
    blk.order = t - set.half_degree(g);
    blk.basis = monomial_basis(set.dim(), blk.order);
    const Poly<double> gd = set.generators()[g].cast<double>();
    for (std::size_t i = 0; i < blk.basis.size(); ++i)
      for (std::size_t j = 0; j < blk.basis.size(); ++j) {
        const MultiIndex ab = blk.basis[i] + blk.basis[j];
        for (const auto& [gamma, c] : gd.terms()) blk.entries.push_back({i, j, inst.index.position(ab + gamma), c});
      }
    inst.blocks.push_back(std::move(blk));
  }
  return inst;
}

/// -sum_g log det M_g(phi), or nullopt if some block is not positive definite.
inline std::optional<double> objective(const Instance& inst, const Eigen::VectorXd& phi) {
  double f = 0.0;
  for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
    Eigen::LLT<Eigen::MatrixXd> llt(inst.block_matrix(b, phi));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
    if ((d.array() <= 0.0).any() || !d.allFinite()) return std::nullopt;
    f -= 2.0 * d.array().log().sum();
  }
  return f;
}

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;  // over free variables (positions 1..)
  Eigen::MatrixXd hessian;
};

/// Value, gradient g_a = -sum_g tr(M_g^{-1} A_{g,a}) and Hessian
/// H_ab = sum_g tr(M_g^{-1} A_{g,a} M_g^{-1} A_{g,b}).
inline Evaluation evaluate(const Instance& inst, const Eigen::VectorXd& phi) {
  const auto nv = static_cast<Eigen::Index>(inst.num_variables());
  Evaluation ev{0.0, Eigen::VectorXd::Zero(nv), Eigen::MatrixXd::Zero(nv, nv)};
  for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
    const Eigen::MatrixXd m = inst.block_matrix(b, phi);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite(inst.blocks[b].label, 0, m.minCoeff());
    ev.value -= 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const Eigen::MatrixXd w = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    const auto& entries = inst.blocks[b].entries;
    for (const auto& e1 : entries) {
      if (e1.var == 0) continue;
      const auto v1 = static_cast<Eigen::Index>(e1.var - 1);
      ev.gradient(v1) -= e1.coeff * w(static_cast<Eigen::Index>(e1.col), static_cast<Eigen::Index>(e1.row));
      for (const auto& e2 : entries) {
        if (e2.var == 0) continue;
        ev.hessian(v1, static_cast<Eigen::Index>(e2.var - 1)) +=
            e1.coeff * e2.coeff * w(static_cast<Eigen::Index>(e2.col), static_cast<Eigen::Index>(e1.row)) *
            w(static_cast<Eigen::Index>(e1.col), static_cast<Eigen::Index>(e2.row));
      }
    }
  }
  return ev;
}

struct SolverOptions {
  double tol = 1e-10;  // stop when lambda^2 / 2 <= tol
  int max_iterations = 200;
  double armijo = 0.01;
  bool trace = false;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double decrement = 0.0;  // lambda^2 / 2
  double step = 0.0;
  int backtracks = 0;
  double moment_bound_ratio = 0.0;  // max |phi_alpha| / R^{|alpha|/2} at the iterate
};

/// max over alpha of |phi_alpha| / R^{|alpha|/2}; at most 1 for any
/// probability measure on a set inside the ball of radius sqrt(R).
inline double moment_bound_ratio(const MomentSequence<double>& phi, double radius) {
  double worst = 0.0;
  const auto& basis = phi.index().basis();
  for (std::size_t i = 0; i < basis.size(); ++i)
    worst = std::max(worst, std::abs(phi.values()[i]) / std::pow(radius, 0.5 * basis[i].degree()));
  return worst;
}

struct SolveReport {
  std::string set_name;
  int t = 0;
  bool converged = false;
  double rho = 0.0;
  MomentSequence<double> phi;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> dual;  // Q_g = M_g(phi*)^{-1}
  double stationarity_residual = 0.0;
  double decrement = 0.0;
  int iterations = 0;
  int backtracks = 0;
  double wall_seconds = 0.0;
  std::vector<IterationRecord> trace;
};

struct DualCertificate {
  std::size_t constant = 0;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> matrices;
  Poly<double> residual;  // sum_g g v^T Q_g v - constant
  double residual_max = 0.0;
  double rho_primal = 0.0;
  double rho_dual = 0.0;
  double duality_gap = 0.0;  // relative
};

namespace detail {
inline Poly<double> quadratic_form(const Eigen::MatrixXd& q, const std::vector<MultiIndex>& basis) {
  Poly<double> p(basis.front().dim());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      p.add_term(basis[i] + basis[j], q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  return p;
}

inline DualCertificate certificate_at(const Instance& inst, const Eigen::VectorXd& phi) {
  DualCertificate c;
  c.constant = inst.set.pell_constant(inst.t);
  Poly<double> sum = Poly<double>::constant(inst.set.dim(), -static_cast<double>(c.constant));
  for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
    const Eigen::MatrixXd m = inst.block_matrix(b, phi);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite(inst.blocks[b].label, 0, m.minCoeff());
    Eigen::MatrixXd q = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    q = 0.5 * (q + q.transpose()).eval();
    c.rho_primal -= 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    // eigenvalues, not the factor of M, so the two objectives are computed independently
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues();
    if (ev.minCoeff() <= 0.0) throw NotPositiveDefinite("Q_" + inst.blocks[b].label, 0, ev.minCoeff());
    c.rho_dual += ev.array().log().sum();
    sum += inst.set.generators()[inst.blocks[b].generator].cast<double>() * quadratic_form(q, inst.blocks[b].basis);
    c.labels.push_back(inst.blocks[b].label);
    c.matrices.push_back(std::move(q));
  }
  c.residual = std::move(sum);
  c.residual_max = c.residual.max_abs_coeff();
  c.duality_gap = std::abs(c.rho_primal - c.rho_dual) / std::max(1.0, std::abs(c.rho_primal));
  return c;
}
}  // namespace detail

/// Damped Newton on the log-det barrier over the slice phi_0 = 1. Every
/// accepted iterate keeps all blocks positive definite.
inline SolveReport solve_primal(const Instance& inst, const MomentSequence<double>& start,
                                const SolverOptions& opts = {}) {
  const auto clock_start = std::chrono::steady_clock::now();
  Eigen::VectorXd x = inst.to_vector(start.order() > 2 * inst.t ? start.restrict(2 * inst.t) : start);
  if (std::abs(x(0) - 1.0) > 1e-12) throw InvalidArgument("start must be normalized (phi_0 = 1)");
  x(0) = 1.0;
  std::optional<double> fx = objective(inst, x);
  if (!fx) throw SolverError("infeasible start: some localizing matrix is not positive definite");

  SolveReport r;
  r.set_name = inst.set.name();
  r.t = inst.t;
  const auto nv = static_cast<Eigen::Index>(inst.num_variables());
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Evaluation ev = evaluate(inst, x);
    Eigen::LLT<Eigen::MatrixXd> llt(ev.hessian);
    if (llt.info() != Eigen::Success) {
      const double shift = 1e-12 * std::max(1.0, ev.hessian.diagonal().cwiseAbs().maxCoeff());
      llt.compute(ev.hessian + shift * Eigen::MatrixXd::Identity(nv, nv));
      if (llt.info() != Eigen::Success) throw SolverError("Hessian is numerically singular");
    }
    const Eigen::VectorXd d = llt.solve(-ev.gradient);
    const double slope = ev.gradient.dot(d);
    const double decrement = -0.5 * slope;
    r.decrement = decrement;
    IterationRecord rec{iter, ev.value, decrement, 0.0, 0, 0.0};
    if (opts.trace) rec.moment_bound_ratio = moment_bound_ratio(inst.to_sequence(x), inst.set.radius());

    Eigen::VectorXd dx = Eigen::VectorXd::Zero(x.size());
    dx.tail(nv) = d;
    if (decrement <= opts.tol) {
      // Final full step; quadratic convergence makes it essentially free accuracy.
      if (auto f_full = objective(inst, x + dx); f_full && *f_full <= ev.value + 1e-12 * std::abs(ev.value)) {
        x += dx;
        rec.step = 1.0;
      }
      r.converged = true;
      r.iterations = iter;
      if (opts.trace) r.trace.push_back(rec);
      break;
    }
    double step = 1.0;
    while (true) {
      const Eigen::VectorXd trial = x + step * dx;
      const auto ft = objective(inst, trial);
      if (ft && *ft <= ev.value + opts.armijo * step * slope) {
        x = trial;
        fx = ft;
        break;
      }
      step *= 0.5;
      ++rec.backtracks;
      if (step < 1e-20) throw SolverError("line search failed to find a feasible descent step");
    }
    rec.step = step;
    r.backtracks += rec.backtracks;
    r.iterations = iter + 1;
    if (opts.trace) r.trace.push_back(rec);
  }
  if (!r.converged)
    throw SolverError("maximum iterations (" + std::to_string(opts.max_iterations) + ") exceeded; decrement " +
                      std::to_string(r.decrement));

  r.phi = inst.to_sequence(x);
  const DualCertificate cert = detail::certificate_at(inst, x);
  r.rho = cert.rho_primal;
  r.labels = cert.labels;
  r.dual = cert.matrices;
  r.stationarity_residual = cert.residual_max;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return r;
}

/// Rebuilds Q_g = M_g(phi*)^{-1}, the polynomial identity
/// sum_g g v^T Q_g v = sum_g s(t - t_g), and both objective values.
inline DualCertificate dual_certificate(const Instance& inst, const SolveReport& report) {
  if (!report.converged) throw SolverError("dual certificate requested for a non-converged solve");
  return detail::certificate_at(inst, inst.to_vector(report.phi));
}

/// Convenience: assemble, start from the sampled uniform measure, solve.
inline SolveReport solve_set(const GeneratorSet& set, int t, const SolverOptions& opts = {},
                             const UniformSampling& sampling = {}) {
  const Instance inst = assemble_instance(set, t);
  return solve_primal(inst, uniform_start_moments(set, t, sampling), opts);
}

struct ExtensionRow {
  int t = 0;  // compares phi*_{2t} with phi*_{2(t+1)}
  double distance = 0.0;
  bool extension = false;
};

struct ExtensionTable {
  std::string set_name;
  double tolerance = 0.0;
  std::vector<SolveReport> solves;
  std::vector<ExtensionRow> rows;
  std::optional<std::string> error;  // set when a solve failed; rows are partial
};

/// Solves every order in [t_from, t_to] (concurrently) and compares
/// consecutive optima. Output order is by t.
inline ExtensionTable extension_sweep(const GeneratorSet& set, int t_from, int t_to, double tol = 1e-6,
                                      const SolverOptions& opts = {}, const UniformSampling& sampling = {}) {
  if (t_from < 1 || t_from > t_to) throw InvalidArgument("need 1 <= t_from <= t_to");
  std::vector<std::future<SolveReport>> jobs;
  for (int t = t_from; t <= t_to; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] { return solve_set(set, t, opts, sampling); }));
  ExtensionTable table{set.name(), tol, {}, {}, std::nullopt};
  for (auto& job : jobs) {
    if (table.error) {
      job.wait();
      continue;
    }
    try {
      table.solves.push_back(job.get());
    } catch (const Error& e) {
      table.error = std::string("t = ") + std::to_string(t_from + static_cast<int>(table.solves.size())) + ": " + e.what();
    }
  }
  for (std::size_t i = 0; i + 1 < table.solves.size(); ++i) {
    const double d = extension_distance(table.solves[i].phi, table.solves[i + 1].phi);
    table.rows.push_back({table.solves[i].t, d, d <= tol});
  }
  return table;
}

/// <M, Q> - k - log det M - log det Q for PD M, Q of size k: nonnegative, and
/// zero exactly when Q = M^{-1}.
inline double fenchel_gap(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q) {
  if (m.rows() != m.cols() || q.rows() != q.cols() || m.rows() != q.rows())
    throw DimensionMismatch("Fenchel gap needs square matrices of equal size");
  Eigen::LLT<Eigen::MatrixXd> lm(m), lq(q);
  if (lm.info() != Eigen::Success) throw NotPositiveDefinite("M", 0, m.minCoeff());
  if (lq.info() != Eigen::Success) throw NotPositiveDefinite("Q", 0, q.minCoeff());
  const double logdet = 2.0 * (lm.matrixLLT().diagonal().array().log().sum() + lq.matrixLLT().diagonal().array().log().sum());
  return (m.cwiseProduct(q)).sum() - static_cast<double>(m.rows()) - logdet;
}

/// Max relative error between analytic and central-difference gradient and
/// Hessian-vector products at a strictly feasible phi. Each probe direction
/// is scaled to unit length in the local norm sqrt(d^T H d), so h is a
/// dimensionless step and every stencil point stays inside the Dikin
/// ellipsoid (hence feasible).
inline double gradient_fd_check(const Instance& inst, const MomentSequence<double>& phi, double h) {
  if (!(h >= 1e-7 && h <= 1e-4)) throw InvalidArgument("finite-difference step must lie in [1e-7, 1e-4]");
  const Eigen::VectorXd x = inst.to_vector(phi.order() > 2 * inst.t ? phi.restrict(2 * inst.t) : phi);
  if (!objective(inst, x)) throw InvalidArgument("finite-difference check needs a strictly feasible point");
  const Evaluation ev = evaluate(inst, x);
  const auto nv = static_cast<Eigen::Index>(inst.num_variables());

  auto shifted = [&](const Eigen::VectorXd& dir, double s) {
    Eigen::VectorXd y = x;
    y.tail(nv) += s * dir;
    return y;
  };
  auto value = [&](const Eigen::VectorXd& y) {
    const auto f = objective(inst, y);
    if (!f) throw SolverError("finite-difference stencil left the feasible region");
    return *f;
  };

  Eigen::VectorXd fd_grad(nv);
  for (Eigen::Index i = 0; i < nv; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(nv, i);
    const double s = h / std::sqrt(ev.hessian(i, i));
    fd_grad(i) = (value(shifted(e, s)) - value(shifted(e, -s))) / (2.0 * s);
  }
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(nv);
  for (Eigen::Index i = 0; i < nv; ++i) v(i) = normal(rng);
  v /= std::sqrt(v.dot(ev.hessian * v));
  const Eigen::VectorXd fd_hv =
      (evaluate(inst, shifted(v, h)).gradient - evaluate(inst, shifted(v, -h)).gradient) / (2.0 * h);
  const Eigen::VectorXd hv = ev.hessian * v;

  const double grad_err = (fd_grad - ev.gradient).cwiseAbs().maxCoeff() /
                          std::max(ev.gradient.cwiseAbs().maxCoeff(), 1e-300);
  const double hess_err = (fd_hv - hv).cwiseAbs().maxCoeff() / std::max(hv.cwiseAbs().maxCoeff(), 1e-300);
  return std::max(grad_err, hess_err);
}

}  // namespace pellsos
