#include "psr/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace psr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPresolveTol = 1e-9;  // coordinates with a_k below are pinned to 0
constexpr int kMaxIterations = 100;
constexpr double kStepFraction = 0.98;

// One linear row over the cone variable (X in S^n_+, s in R^p_+):
// <F, X> + g . s = b.
struct ConeRow {
  MatrixXd F;
  VectorXd g;
  double b = 0.0;
};

// max <C, X> subject to the rows above.
struct ConeProblem {
  int n = 0;
  int p = 0;
  MatrixXd C;
  std::vector<ConeRow> rows;
};

struct ConeResult {
  enum class Status { kConverged, kMaxIterations, kFailure };
  Status status = Status::kFailure;
  int iterations = 0;
  MatrixXd X;
  VectorXd s;
  VectorXd y;
  MatrixXd Z;
  VectorXd w;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double p_feas = kInf;
  double d_feas = kInf;
  double gap = kInf;
  bool diverged = false;
};

double sym_dot(const MatrixXd& A, const MatrixXd& B) {
  return (A.array() * B.array()).sum();
}

// Largest step t with B + t*dB staying PSD, given the LLT factor of B.
double max_psd_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dB) {
  MatrixXd W = llt.matrixL().solve(dB);
  W = llt.matrixL().solve(W.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (W + W.transpose()),
                                              Eigen::EigenvaluesOnly);
  const double mineig = eig.eigenvalues().minCoeff();
  return mineig >= 0.0 ? kInf : -1.0 / mineig;
}

double max_pos_step(const VectorXd& v, const VectorXd& dv) {
  double step = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) {
      step = std::min(step, -v[i] / dv[i]);
    }
  }
  return step;
}

ConeResult solve_cone(const ConeProblem& prob, double tol, int max_iters) {
  const int n = prob.n;
  const int p = prob.p;
  const int m = static_cast<int>(prob.rows.size());

  // Row and objective normalization; y and Z are rescaled on exit.
  std::vector<double> row_scale(m);
  std::vector<ConeRow> rows(m);
  for (int i = 0; i < m; ++i) {
    const ConeRow& r = prob.rows[i];
    row_scale[i] = std::max(1.0, std::sqrt(r.F.squaredNorm() + r.g.squaredNorm()));
    rows[i].F = r.F / row_scale[i];
    rows[i].g = r.g / row_scale[i];
    rows[i].b = r.b / row_scale[i];
  }
  const double obj_scale = std::max(1.0, prob.C.norm());
  const MatrixXd C = prob.C / obj_scale;

  VectorXd b_orig(m);
  double b_orig_norm2 = 0.0;
  for (int i = 0; i < m; ++i) {
    b_orig[i] = prob.rows[i].b;
    b_orig_norm2 += b_orig[i] * b_orig[i];
  }
  const double b_norm = std::sqrt(b_orig_norm2);
  const double c_norm = prob.C.norm();

  ConeResult res;
  const double init = std::max(10.0, 1.5 * std::sqrt(double(n + p)));
  res.X = init * MatrixXd::Identity(n, n);
  res.Z = init * MatrixXd::Identity(n, n);
  res.s = VectorXd::Constant(p, init);
  res.w = VectorXd::Constant(p, init);
  res.y = VectorXd::Zero(m);

  VectorXd rp(m);
  MatrixXd Rd(n, n);
  VectorXd rd_lp(p);
  std::vector<MatrixXd> T(m);

  for (int iter = 0; iter < max_iters; ++iter) {
    res.iterations = iter;

    // Residuals on the scaled data.
    for (int i = 0; i < m; ++i) {
      rp[i] = rows[i].b - sym_dot(rows[i].F, res.X) - rows[i].g.dot(res.s);
    }
    Rd.setZero();
    rd_lp.setZero();
    for (int i = 0; i < m; ++i) {
      Rd += res.y[i] * rows[i].F;
      rd_lp += res.y[i] * rows[i].g;
    }
    Rd -= C + res.Z;
    rd_lp -= res.w;

    // Convergence is measured against the original data.
    double p_res2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double ri = rp[i] * row_scale[i];
      p_res2 += ri * ri;
    }
    const double pobj = obj_scale * sym_dot(C, res.X);
    double dobj = 0.0;
    for (int i = 0; i < m; ++i) {
      dobj += rows[i].b * res.y[i];
    }
    dobj *= obj_scale;
    res.primal_obj = pobj;
    res.dual_obj = dobj;
    res.p_feas = std::sqrt(p_res2) / (1.0 + b_norm);
    res.d_feas = obj_scale *
                 std::sqrt(Rd.squaredNorm() + rd_lp.squaredNorm()) /
                 (1.0 + c_norm);
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (res.p_feas <= tol && res.d_feas <= tol && res.gap <= tol) {
      res.status = ConeResult::Status::kConverged;
      return res;
    }
    if (res.y.lpNorm<Eigen::Infinity>() > 1e10 * (1.0 + b_norm)) {
      res.diverged = true;
      res.status = ConeResult::Status::kMaxIterations;
      return res;
    }

    const double mu =
        (sym_dot(res.X, res.Z) + res.s.dot(res.w)) / double(n + p);

    Eigen::LLT<MatrixXd> z_llt(res.Z);
    Eigen::LLT<MatrixXd> x_llt(res.X);
    if (z_llt.info() != Eigen::Success || x_llt.info() != Eigen::Success) {
      res.status = ConeResult::Status::kFailure;
      return res;
    }
    const MatrixXd Zinv = z_llt.solve(MatrixXd::Identity(n, n));

    // Schur complement M_ij = <F_i, X F_j Zinv> + sum_l g_il g_jl s_l / w_l.
    const VectorXd sw = res.s.cwiseQuotient(res.w);
    MatrixXd M(m, m);
    for (int j = 0; j < m; ++j) {
      T[j] = res.X * rows[j].F * Zinv;
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        M(i, j) = sym_dot(rows[i].F, T[j]) +
                  (rows[i].g.array() * rows[j].g.array() * sw.array()).sum();
      }
    }
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::LDLT<MatrixXd> m_ldlt(M);
    if (m_ldlt.info() != Eigen::Success) {
      M.diagonal().array() += 1e-12 * (1.0 + M.diagonal().maxCoeff());
      m_ldlt.compute(M);
      if (m_ldlt.info() != Eigen::Success) {
        res.status = ConeResult::Status::kFailure;
        return res;
      }
    }
    auto solve_newton = [&](const VectorXd& rhs) {
      VectorXd dy = m_ldlt.solve(rhs);
      dy += m_ldlt.solve(rhs - M * dy);  // one refinement pass
      return dy;
    };

    // A(X Rd Zinv)_i and sigma*mu*A(Zinv)_i building blocks.
    const MatrixXd XRdZinv = res.X * Rd * Zinv;
    VectorXd a_zinv(m), a_xrd(m);
    for (int i = 0; i < m; ++i) {
      a_zinv[i] = sym_dot(rows[i].F, Zinv) +
                  (rows[i].g.array() / res.w.array()).sum();
      a_xrd[i] = sym_dot(rows[i].F, XRdZinv) +
                 (rows[i].g.array() * sw.array() * rd_lp.array()).sum();
    }
    VectorXd b_scaled(m);
    for (int i = 0; i < m; ++i) {
      b_scaled[i] = rows[i].b;
    }

    // Predictor (affine scaling) direction.
    const VectorXd dy_aff = solve_newton(-b_scaled - a_xrd);
    MatrixXd dZ_aff = Rd;
    VectorXd dw_aff = rd_lp;
    for (int i = 0; i < m; ++i) {
      dZ_aff += dy_aff[i] * rows[i].F;
      dw_aff += dy_aff[i] * rows[i].g;
    }
    MatrixXd dX_aff = -res.X - res.X * dZ_aff * Zinv;
    dX_aff = 0.5 * (dX_aff + dX_aff.transpose()).eval();
    const VectorXd ds_aff =
        -res.s.array() - sw.array() * dw_aff.array();

    const double ap_aff = std::min(
        1.0, std::min(max_psd_step(x_llt, dX_aff), max_pos_step(res.s, ds_aff)));
    const double ad_aff = std::min(
        1.0, std::min(max_psd_step(z_llt, dZ_aff), max_pos_step(res.w, dw_aff)));

    const double mu_aff =
        (sym_dot(res.X + ap_aff * dX_aff, res.Z + ad_aff * dZ_aff) +
         (res.s + ap_aff * ds_aff).dot(res.w + ad_aff * dw_aff)) /
        double(n + p);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // Corrector direction with Mehrotra second-order term.
    const MatrixXd cross = dX_aff * dZ_aff * Zinv;
    VectorXd a_cross(m);
    for (int i = 0; i < m; ++i) {
      a_cross[i] =
          sym_dot(rows[i].F, cross) +
          (rows[i].g.array() * ds_aff.array() * dw_aff.array() / res.w.array())
              .sum();
    }
    const VectorXd dy =
        solve_newton(sigma * mu * a_zinv - b_scaled - a_xrd - a_cross);
    MatrixXd dZ = Rd;
    VectorXd dw = rd_lp;
    for (int i = 0; i < m; ++i) {
      dZ += dy[i] * rows[i].F;
      dw += dy[i] * rows[i].g;
    }
    MatrixXd dX = sigma * mu * Zinv - res.X - cross - res.X * dZ * Zinv;
    dX = 0.5 * (dX + dX.transpose()).eval();
    const VectorXd ds = (sigma * mu / res.w.array()) - res.s.array() -
                        ds_aff.array() * dw_aff.array() / res.w.array() -
                        sw.array() * dw.array();

    const double ap = std::min(
        1.0, kStepFraction *
                 std::min(max_psd_step(x_llt, dX), max_pos_step(res.s, ds)));
    const double ad = std::min(
        1.0, kStepFraction *
                 std::min(max_psd_step(z_llt, dZ), max_pos_step(res.w, dw)));
    if (ap < 1e-10 && ad < 1e-10) {
      res.status = ConeResult::Status::kFailure;
      return res;
    }

    res.X += ap * dX;
    res.s += ap * ds;
    res.y += ad * dy;
    res.Z += ad * dZ;
    res.w += ad * dw;
  }
  res.iterations = max_iters;
  res.status = ConeResult::Status::kMaxIterations;
  return res;
}

// Indices of coordinates that stay in the reduced problem. A zero expansion
// coordinate forces Lambda_kk = 0, and PSD-ness then zeroes the whole row.
std::vector<int> active_coordinates(const SdrInstance& inst) {
  std::vector<int> active;
  for (int k = 0; k < inst.K; ++k) {
    if (inst.diag_coupling[k] > kPresolveTol) {
      active.push_back(k);
    }
  }
  return active;
}

// Cone formulation of the instance restricted to the active coordinates.
// Optionally swaps the objective for the rate row (feasibility phase).
ConeProblem build_cone(const SdrInstance& inst, const std::vector<int>& active,
                       bool phase1) {
  const int ka = static_cast<int>(active.size());
  const int n = ka + 1;
  const bool with_rate = !inst.rate_trivial && !phase1;
  const int p = 2 * ka + (with_rate ? 1 : 0);

  ConeProblem prob;
  prob.n = n;
  prob.p = p;

  auto lambda_pick = [&](int i) {
    MatrixXd F = MatrixXd::Zero(n, n);
    F(i, n - 1) = 0.5;
    F(n - 1, i) = 0.5;
    return F;
  };

  MatrixXd rate_F = MatrixXd::Zero(n, n);
  for (int i = 0; i < ka; ++i) {
    for (int j = 0; j < ka; ++j) {
      rate_F(i, j) = inst.rate_Lambda(active[i], active[j]);
    }
    rate_F(i, n - 1) += 0.5 * inst.rate_lambda[active[i]];
    rate_F(n - 1, i) += 0.5 * inst.rate_lambda[active[i]];
  }

  if (phase1) {
    prob.C = rate_F;
  } else {
    prob.C = MatrixXd::Zero(n, n);
    for (int i = 0; i < ka; ++i) {
      for (int j = 0; j < ka; ++j) {
        prob.C(i, j) = inst.obj_lin_Lambda(active[i], active[j]);
      }
      prob.C(i, n - 1) += 0.5 * inst.obj_lin_lambda[active[i]];
      prob.C(n - 1, i) += 0.5 * inst.obj_lin_lambda[active[i]];
    }
  }

  // Diagonal coupling Lambda_kk = a_k lambda_k.
  for (int i = 0; i < ka; ++i) {
    ConeRow row;
    row.F = MatrixXd::Zero(n, n);
    row.F(i, i) = 1.0;
    row.F -= inst.diag_coupling[active[i]] * lambda_pick(i);
    row.g = VectorXd::Zero(p);
    row.b = 0.0;
    prob.rows.push_back(std::move(row));
  }
  // Homogenizing corner.
  {
    ConeRow row;
    row.F = MatrixXd::Zero(n, n);
    row.F(n - 1, n - 1) = 1.0;
    row.g = VectorXd::Zero(p);
    row.b = 1.0;
    prob.rows.push_back(std::move(row));
  }
  // Box rows, one slack each.
  for (int i = 0; i < ka; ++i) {
    ConeRow lo;
    lo.F = lambda_pick(i);
    lo.g = VectorXd::Zero(p);
    lo.g[2 * i] = -1.0;
    lo.b = inst.box_lo[active[i]];
    prob.rows.push_back(std::move(lo));
    ConeRow hi;
    hi.F = lambda_pick(i);
    hi.g = VectorXd::Zero(p);
    hi.g[2 * i + 1] = 1.0;
    hi.b = inst.box_hi[active[i]];
    prob.rows.push_back(std::move(hi));
  }
  if (with_rate) {
    ConeRow rate;
    rate.F = rate_F;
    rate.g = VectorXd::Zero(p);
    rate.g[p - 1] = -1.0;
    rate.b = 0.0;
    prob.rows.push_back(std::move(rate));
  }
  return prob;
}

}  // namespace

SdrInstance assemble_sdr(const ProblemData& pd, const LinearizedEnergy& le,
                         double psi_bits, const VectorXd& a,
                         const VectorXd& eps, const SystemParams& p) {
  p.validate();
  const Eigen::Index K = pd.g1.size();
  if (a.size() != K || eps.size() != K) {
    throw std::invalid_argument("assemble_sdr: dimension mismatch");
  }
  if (!(psi_bits >= 0.0) || !std::isfinite(psi_bits)) {
    throw std::invalid_argument("assemble_sdr: psi must be nonnegative");
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(eps[k] > 0.0)) {
      throw std::invalid_argument("assemble_sdr: eps must be positive");
    }
    if (!(a[k] >= 0.0 && a[k] <= 1.0)) {
      throw std::invalid_argument("assemble_sdr: expansion point outside [0, 1]");
    }
  }

  SdrInstance inst;
  inst.K = static_cast<int>(K);
  inst.obj_lin_lambda = -le.G2pp.transpose() * le.zeta;
  inst.obj_lin_Lambda = 0.25 * le.G2p;
  inst.obj_offset = le.gamma;
  const double rate_coeff = std::exp2(psi_bits) - 1.0;
  inst.rate_Lambda = p.transmit_power * pd.G1;
  inst.rate_Lambda -=
      (rate_coeff * pd.Sigma_diag).asDiagonal() * MatrixXd::Identity(K, K);
  inst.rate_lambda = -rate_coeff * pd.sigma;
  inst.rate_trivial = rate_coeff == 0.0;
  inst.box_lo = (a - eps).cwiseMax(0.0);
  inst.box_hi = (a + eps).cwiseMin(1.0);
  inst.diag_coupling = a;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (inst.box_lo[k] > inst.box_hi[k]) {
      throw std::invalid_argument("assemble_sdr: empty box after clamping");
    }
  }
  return inst;
}

const char* to_string(SdrStatus status) {
  switch (status) {
    case SdrStatus::kOptimal:
      return "optimal";
    case SdrStatus::kInfeasible:
      return "infeasible";
    case SdrStatus::kMaxIterations:
      return "max-iterations";
    case SdrStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

SdrSolution solve_sdr(const SdrInstance& inst, double tol) {
  if (!(tol > 0.0 && tol <= 1e-4)) {
    throw std::invalid_argument("solve_sdr: tol must lie in (0, 1e-4]");
  }
  const int K = inst.K;
  const std::vector<int> active = active_coordinates(inst);
  const int ka = static_cast<int>(active.size());

  SdrSolution sol;
  sol.lambda = VectorXd::Zero(K);
  sol.Lambda = MatrixXd::Zero(K, K);

  auto finish = [&](SdrStatus status) {
    sol.status = status;
    sol.objective = inst.obj_offset +
                    sym_dot(inst.obj_lin_Lambda, sol.Lambda) +
                    inst.obj_lin_lambda.dot(sol.lambda);
    MatrixXd lifted(K + 1, K + 1);
    lifted.topLeftCorner(K, K) = sol.Lambda;
    lifted.topRightCorner(K, 1) = sol.lambda;
    lifted.bottomLeftCorner(1, K) = sol.lambda.transpose();
    lifted(K, K) = 1.0;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(lifted, Eigen::EigenvaluesOnly);
    sol.kkt.psd_min_eig = eig.eigenvalues().minCoeff();
    return sol;
  };

  if (ka == 0) {
    // Everything pinned at zero; feasible iff the boxes admit 0 (they do by
    // construction) and the rate row holds at the origin, which it does.
    sol.kkt = {};
    return finish(SdrStatus::kOptimal);
  }

  const ConeProblem prob = build_cone(inst, active, /*phase1=*/false);
  const ConeResult res = solve_cone(prob, tol, kMaxIterations);
  sol.iterations = res.iterations;

  auto extract = [&](const ConeResult& r) {
    const int n = ka + 1;
    for (int i = 0; i < ka; ++i) {
      sol.lambda[active[i]] = r.X(i, n - 1);
      for (int j = 0; j < ka; ++j) {
        sol.Lambda(active[i], active[j]) = r.X(i, j);
      }
    }
  };

  if (res.status == ConeResult::Status::kConverged) {
    extract(res);
    sol.kkt.primal_feas = res.p_feas;
    sol.kkt.dual_feas = res.d_feas;
    sol.kkt.complementarity = res.gap;
    return finish(SdrStatus::kOptimal);
  }

  // Certify infeasibility: maximize the rate functional over the remaining
  // constraints; a negative optimum means no split in the box meets the rate.
  if (!inst.rate_trivial) {
    const ConeProblem feas = build_cone(inst, active, /*phase1=*/true);
    const ConeResult fres = solve_cone(feas, std::max(tol, 1e-9), kMaxIterations);
    if (fres.status == ConeResult::Status::kConverged &&
        fres.primal_obj < -std::max(1e-7, 10.0 * tol)) {
      extract(fres);
      sol.kkt.primal_feas = res.p_feas;
      sol.kkt.dual_feas = res.d_feas;
      sol.kkt.complementarity = res.gap;
      return finish(SdrStatus::kInfeasible);
    }
  }

  extract(res);
  sol.kkt.primal_feas = res.p_feas;
  sol.kkt.dual_feas = res.d_feas;
  sol.kkt.complementarity = res.gap;
  return finish(res.status == ConeResult::Status::kMaxIterations
                    ? SdrStatus::kMaxIterations
                    : SdrStatus::kNumericalFailure);
}

bool check_schur(const MatrixXd& Lambda, const VectorXd& lambda, double tol) {
  const Eigen::Index K = lambda.size();
  if (Lambda.rows() != K || Lambda.cols() != K) {
    throw std::invalid_argument("check_schur: dimension mismatch");
  }
  MatrixXd lifted(K + 1, K + 1);
  lifted.topLeftCorner(K, K) = Lambda;
  lifted.topRightCorner(K, 1) = lambda;
  lifted.bottomLeftCorner(1, K) = lambda.transpose();
  lifted(K, K) = 1.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(lifted, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

namespace {

void dump_vector(std::ostream& os, const char* name, const VectorXd& v) {
  os << name << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    os << buf << (i + 1 < v.size() ? " " : "");
  }
  os << "\n";
}

void dump_matrix(std::ostream& os, const char* name, const MatrixXd& m) {
  os << name << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      os << buf << (j + 1 < m.cols() ? " " : "");
    }
    os << "\n";
  }
}

}  // namespace

void dump_instance(const SdrInstance& inst, std::ostream& os) {
  os << "sdr-instance v1\n";
  os << "K " << inst.K << "\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", inst.obj_offset);
  os << "obj_offset " << buf << "\n";
  dump_vector(os, "obj_lin_lambda", inst.obj_lin_lambda);
  dump_matrix(os, "obj_lin_Lambda", inst.obj_lin_Lambda);
  os << "rate_trivial " << (inst.rate_trivial ? 1 : 0) << "\n";
  dump_vector(os, "rate_lambda", inst.rate_lambda);
  dump_matrix(os, "rate_Lambda", inst.rate_Lambda);
  dump_vector(os, "box_lo", inst.box_lo);
  dump_vector(os, "box_hi", inst.box_hi);
  dump_vector(os, "diag_coupling", inst.diag_coupling);
}

}  // namespace psr
