#ifndef NLLRTC_SOLVER_HPP_
#define NLLRTC_SOLVER_HPP_

#include <array>
#include <vector>

#include "nllrtc/similarity.hpp"
#include "nllrtc/tensor.hpp"

namespace nllrtc {

struct SolverConfig {
  std::array<double, 4> alpha{0.25, 0.25, 0.25, 0.25};
  double beta = 1.0;
  std::array<double, 4> epsilon{1e-4, 1e-4, 1e-4, 1e-4};
  double tol = 1e-5;
  int maxIter = 100;

  void setEpsilon(double eps) { epsilon.fill(eps); }
  void validate() const;
};

struct SolverTrace {
  int iterations = 0;
  std::vector<double> relChange;  // per-iteration ||X^{k+1}-X^k||_F/||X^k||_F
  bool converged = false;
};

/// Linearized logDet weights: omega_j = 1 / (sigma_j + eps). Nondecreasing
/// for a nonincreasing sigma, so larger singular values are shrunk less.
Eigen::VectorXd logdetWeights(const Eigen::VectorXd& sigma, double eps);

/// Closed-form minimizer of tau * omega^T sigma(X) + 1/2 ||X - m||_F^2:
/// shrink each singular value of m by tau * omega_j and clamp at zero.
Eigen::MatrixXd weightedSvt(const Eigen::MatrixXd& m, double tau,
                            const Eigen::VectorXd& omega);

/// ADMM completion of a patch group under the logDet rank surrogate.
/// Observed entries of the output equal the input exactly.
std::pair<TensorXd, SolverTrace> admmComplete(const PatchGroup& group,
                                              const SolverConfig& cfg);

/// Same ADMM skeleton with unit weights (plain nuclear-norm shrinkage),
/// applied to a whole tensor without patching.
std::pair<TensorXd, SolverTrace> halrtcComplete(const TensorXd& values,
                                                const TensorXb& mask,
                                                const SolverConfig& cfg);

}  // namespace nllrtc

#endif  // NLLRTC_SOLVER_HPP_
