#include "dynabg/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace dynabg {

void SolverConfig::validate() const {
  if (lambda && !(*lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(mu0 > 0.0)) throw std::invalid_argument("mu0 must be > 0");
  if (!(rho > 1.0)) throw std::invalid_argument("rho must be > 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max-iter must be >= 1");
  if (!(mu_cap > 0.0)) throw std::invalid_argument("mu-cap must be > 0");
}

double SolverConfig::lambda_for(Eigen::Index rows, Eigen::Index cols) const {
  if (lambda) return *lambda;
  return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

SvdResult svd_economy(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

namespace {

// Reconstruction from the components whose shrunk singular value stays
// positive; rank_out reports how many survive.
Eigen::MatrixXd svt_from(const SvdResult& svd, double tau, Eigen::Index rows,
                         Eigen::Index cols, int* rank_out) {
  Eigen::Index r = 0;
  while (r < svd.S.size() && svd.S(r) > tau) ++r;
  if (rank_out) *rank_out = static_cast<int>(r);
  if (r == 0) {
    return Eigen::MatrixXd::Zero(rows, cols);
  }
  const Eigen::VectorXd shrunk = svd.S.head(r).array() - tau;
  return svd.U.leftCols(r) * shrunk.asDiagonal() * svd.V.leftCols(r).transpose();
}

}  // namespace

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
  const SvdResult svd = svd_economy(m);
  return svt_from(svd, tau, m.rows(), m.cols(), nullptr);
}

Eigen::MatrixXd l1_shrink(const Eigen::MatrixXd& m, double t) {
  if (t < 0.0) throw std::invalid_argument("threshold must be >= 0");
  return m.unaryExpr([t](double v) {
    const double mag = std::abs(v) - t;
    return mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
  });
}

namespace {

void check_partition_shape(const Eigen::MatrixXd& m, const GroupPartition& partition) {
  if (partition.rows != m.rows() || partition.cols != m.cols()) {
    throw std::invalid_argument(
        "partition shape " + std::to_string(partition.rows) + "x" +
        std::to_string(partition.cols) + " does not match matrix " +
        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double group_norm(const Eigen::MatrixXd& m, const std::vector<MatrixEntry>& group) {
  double ss = 0.0;
  for (const MatrixEntry& e : group) {
    const double v = m(e.pixel, e.frame);
    ss += v * v;
  }
  return std::sqrt(ss);
}

}  // namespace

double generalized_l21_norm(const Eigen::MatrixXd& e, const GroupPartition& partition) {
  check_partition_shape(e, partition);
  partition.validate();
  double total = 0.0;
  for (const auto& group : partition.groups) {
    total += std::sqrt(static_cast<double>(group.size())) * group_norm(e, group);
  }
  return total;
}

Eigen::MatrixXd group_shrink(const Eigen::MatrixXd& m, const GroupPartition& partition,
                             double lambda, double mu, WeightMode mode) {
  if (!(lambda > 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("lambda and mu must be > 0");
  }
  check_partition_shape(m, partition);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (const auto& group : partition.groups) {
    const double size = static_cast<double>(group.size());
    const double t = mode == WeightMode::Sqrt ? lambda * std::sqrt(size) / mu
                                              : lambda * size / mu;
    if (group.size() == 1) {
      // degenerates to the scalar soft threshold; same arithmetic as
      // l1_shrink so singleton partitions match it bitwise
      const MatrixEntry& e = group.front();
      const double v = m(e.pixel, e.frame);
      const double mag = std::abs(v) - t;
      out(e.pixel, e.frame) = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
      continue;
    }
    const double norm = group_norm(m, group);
    if (norm > t) {
      const double scale = (norm - t) / norm;
      for (const MatrixEntry& e : group) {
        out(e.pixel, e.frame) = scale * m(e.pixel, e.frame);
      }
    }
    // else the whole group stays exactly zero
  }
  return out;
}

namespace {

enum class SparsePenalty { Entrywise, Grouped };

Decomposition run_inexact_alm(const Eigen::MatrixXd& d, const SolverConfig& config,
                              SparsePenalty penalty, const GroupPartition* partition,
                              WeightMode mode) {
  config.validate();
  if (!d.allFinite()) {
    throw std::invalid_argument("input matrix has non-finite entries");
  }
  if (d.cols() < 2) {
    throw std::invalid_argument("need at least 2 columns, got " +
                                std::to_string(d.cols()));
  }
  if (penalty == SparsePenalty::Grouped) {
    check_partition_shape(d, *partition);
    partition->validate();
  }

  const double lambda = config.lambda_for(d.rows(), d.cols());
  const double d_norm = d.norm();

  Decomposition result;
  result.A = Eigen::MatrixXd::Zero(d.rows(), d.cols());
  result.E = Eigen::MatrixXd::Zero(d.rows(), d.cols());
  result.Y = Eigen::MatrixXd::Zero(d.rows(), d.cols());
  double mu = config.mu0;

  double sv_sum = 0.0;  // nuclear norm of A at the last A-update
  int rank = 0;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    // A-update: singular value thresholding at 1/mu
    const SvdResult svd = svd_economy(d - result.E + result.Y / mu);
    result.A = svt_from(svd, 1.0 / mu, d.rows(), d.cols(), &rank);
    sv_sum = (svd.S.head(rank).array() - 1.0 / mu).sum();

    // E-update: prox of the sparse penalty
    const Eigen::MatrixXd target = d - result.A + result.Y / mu;
    if (penalty == SparsePenalty::Entrywise) {
      result.E = l1_shrink(target, lambda / mu);
    } else {
      result.E = group_shrink(target, *partition, lambda, mu, mode);
    }

    const Eigen::MatrixXd residual = d - result.A - result.E;
    result.Y += mu * residual;
    mu = std::min(config.rho * mu, config.mu_cap);

    const double res_norm = residual.norm();
    result.final_residual = d_norm > 0.0 ? res_norm / d_norm : res_norm;
    result.iterations = iter;
    if (config.observer) {
      config.observer(iter, result.A, result.E);
    }
    if (config.trace) {
      const double sparse_term =
          penalty == SparsePenalty::Entrywise
              ? lambda * result.E.cwiseAbs().sum()
              : lambda * generalized_l21_norm(result.E, *partition);
      result.trace.push_back({iter, result.final_residual, sv_sum + sparse_term, rank});
    }
    if (result.final_residual <= config.tol) {
      result.converged = true;
      break;
    }
  }

  result.rank = rank;
  result.objective =
      penalty == SparsePenalty::Entrywise
          ? sv_sum + lambda * result.E.cwiseAbs().sum()
          : sv_sum + lambda * generalized_l21_norm(result.E, *partition);
  return result;
}

}  // namespace

Decomposition solve_rpca(const Eigen::MatrixXd& d, const SolverConfig& config) {
  return run_inexact_alm(d, config, SparsePenalty::Entrywise, nullptr, WeightMode::Sqrt);
}

Decomposition solve_sc_rpca(const Eigen::MatrixXd& d, const GroupPartition& partition,
                            const SolverConfig& config, WeightMode mode) {
  return run_inexact_alm(d, config, SparsePenalty::Grouped, &partition, mode);
}

}  // namespace dynabg
