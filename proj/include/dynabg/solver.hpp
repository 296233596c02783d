#ifndef DYNABG_SOLVER_HPP
#define DYNABG_SOLVER_HPP

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dynabg/partition.hpp"

namespace dynabg {

// Threshold weight per group: Sqrt uses lambda*sqrt(|C_i|)/mu, the exact
// proximal operator of the generalized l2,1 norm; Linear uses
// lambda*|C_i|/mu, the literal closed form.
enum class WeightMode { Sqrt, Linear };

struct SolverConfig {
  std::optional<double> lambda;  // default 1/sqrt(max(m,n))
  double mu0 = 1e-6;
  double rho = 1.1;
  double tol = 1e-7;
  int max_iter = 1000;
  double mu_cap = 1e10;
  bool trace = false;
  // Diagnostics hook, called once per iteration with the current iterates.
  std::function<void(int iteration, const Eigen::MatrixXd& A, const Eigen::MatrixXd& E)>
      observer;

  void validate() const;
  double lambda_for(Eigen::Index rows, Eigen::Index cols) const;
};

struct TraceRow {
  int iteration = 0;
  double residual = 0.0;
  double objective = 0.0;
  int rank = 0;
};

struct Decomposition {
  Eigen::MatrixXd A;  // low-rank term
  Eigen::MatrixXd E;  // sparse term
  Eigen::MatrixXd Y;  // final multipliers
  int iterations = 0;
  double final_residual = 0.0;  // ||D-A-E||_F / ||D||_F
  double objective = 0.0;
  bool converged = false;
  int rank = 0;  // of A at the last iteration
  std::vector<TraceRow> trace;
};

struct SvdResult {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;  // nonincreasing, >= 0
  Eigen::MatrixXd V;
};

// Thin SVD with r = min(m,n); reconstruction within 1e-9*max(1,||M||_F).
SvdResult svd_economy(const Eigen::MatrixXd& m);

// prox of tau*||.||_* : U diag(max(S - tau, 0)) V^T.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

// prox of t*||.||_1 : entrywise soft threshold.
Eigen::MatrixXd l1_shrink(const Eigen::MatrixXd& m, double t);

// sum_i sqrt(|C_i| * sum_{(j,k) in C_i} E_jk^2)
double generalized_l21_norm(const Eigen::MatrixXd& e, const GroupPartition& partition);

// Groupwise shrinkage: scale a group by (norm - t_i)/norm when its 2-norm
// exceeds its threshold t_i, zero it exactly otherwise.
Eigen::MatrixXd group_shrink(const Eigen::MatrixXd& m, const GroupPartition& partition,
                             double lambda, double mu, WeightMode mode);

// min ||A||_* + lambda ||E||_1  s.t.  D = A + E, by inexact ALM.
Decomposition solve_rpca(const Eigen::MatrixXd& d, const SolverConfig& config);

// min ||A||_* + lambda ||E||_{C(2,1)}  s.t.  D = A + E, by inexact ALM
// with groupwise shrinkage in the E step.
Decomposition solve_sc_rpca(const Eigen::MatrixXd& d, const GroupPartition& partition,
                            const SolverConfig& config,
                            WeightMode mode = WeightMode::Sqrt);

}  // namespace dynabg

#endif
