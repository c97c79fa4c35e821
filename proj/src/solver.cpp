#include "nllrtc/solver.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

#include "nllrtc/errors.hpp"

namespace nllrtc {

void SolverConfig::validate() const {
  double sum = 0.0;
  for (double a : alpha) {
    if (a < 0.0) throw DataError("alpha weights must be nonnegative");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw DataError("alpha weights must sum to 1");
  if (beta <= 0.0) throw DataError("beta must be positive");
  for (double e : epsilon)
    if (e <= 0.0) throw DataError("epsilon must be positive");
  if (tol <= 0.0) throw DataError("tol must be positive");
  if (maxIter < 1) throw DataError("maxIter must be at least 1");
}

Eigen::VectorXd logdetWeights(const Eigen::VectorXd& sigma, double eps) {
  if (eps <= 0.0) throw NumericError("logdet offset must be positive");
  Eigen::VectorXd omega(sigma.size());
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (sigma[j] < 0.0)
      throw NumericError("singular values must be nonnegative");
    omega[j] = 1.0 / (sigma[j] + eps);
  }
  return omega;
}

Eigen::MatrixXd weightedSvt(const Eigen::MatrixXd& m, double tau,
                            const Eigen::VectorXd& omega) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (omega.size() != k)
    throw DataError("weight vector length must equal min(rows, cols)");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU |
                                            Eigen::ComputeThinV);
  Eigen::VectorXd shrunk =
      (svd.singularValues() - tau * omega).cwiseMax(0.0);
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

namespace {

struct SvtResult {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd singularValues;  // of the thresholded matrix
};

SvtResult shrinkWithValues(const Eigen::MatrixXd& m, double tau,
                           const Eigen::VectorXd& omega) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU |
                                            Eigen::ComputeThinV);
  Eigen::VectorXd shrunk =
      (svd.singularValues() - tau * omega).cwiseMax(0.0);
  return {svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose(),
          shrunk};
}

// Shared ADMM skeleton. The weighted variant recomputes the per-mode
// thresholds from the previous M_i iterate's singular values; the
// unweighted variant keeps all weights at one.
std::pair<TensorXd, SolverTrace> admmCore(const TensorXd& y,
                                          const TensorXb& mask,
                                          const SolverConfig& cfg,
                                          bool weighted) {
  cfg.validate();
  if (mask.shape() != y.shape())
    throw DataError("mask not congruent to values");
  bool anyObserved = false;
  for (Eigen::Index p = 0; p < mask.size(); ++p) {
    if (mask[p] > 1) throw DataError("mask must be binary");
    if (mask[p]) anyObserved = true;
    if (!std::isfinite(y[p])) throw NumericError("non-finite input value");
  }
  if (!anyObserved) throw DataError("fully unobserved tensor");

  const int N = y.order();
  std::vector<int> active;  // modes with a nonzero alpha weight
  for (int i = 0; i < N; ++i)
    if (cfg.alpha[static_cast<std::size_t>(i)] > 0.0) active.push_back(i);
  if (active.empty()) throw DataError("no active mode for this tensor order");

  // X starts as the observation with zeros on missing entries; M_i and
  // Lambda_i start at zero.
  TensorXd x(y.shape());
  for (Eigen::Index p = 0; p < y.size(); ++p)
    x[p] = mask[p] ? y[p] : 0.0;

  std::vector<TensorXd> m(active.size(), TensorXd(y.shape()));
  std::vector<TensorXd> lambda(active.size(), TensorXd(y.shape()));
  std::vector<Eigen::VectorXd> prevSigma(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    const int mode = active[a];
    const Eigen::Index rows = y.dim(mode);
    const Eigen::Index cols = countFibers(y.shape(), mode + 1);
    prevSigma[a] = Eigen::VectorXd::Zero(std::min(rows, cols));
  }

  SolverTrace trace;
  const double invA = 1.0 / static_cast<double>(active.size());

  for (int k = 1; k <= cfg.maxIter; ++k) {
    TensorXd xNew(y.shape());
    for (Eigen::Index p = 0; p < y.size(); ++p) {
      if (mask[p]) {
        xNew[p] = y[p];
      } else {
        double acc = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a)
          acc += cfg.beta * m[a][p] - lambda[a][p];
        xNew[p] = acc * invA / cfg.beta;
      }
    }

    double rel = std::numeric_limits<double>::infinity();
    if (k >= 2) {
      const double denom = x.data().norm();
      const double diff = (xNew.data() - x.data()).norm();
      rel = denom > 0.0 ? diff / denom : (diff > 0.0 ? rel : 0.0);
      trace.relChange.push_back(rel);
    }

    for (std::size_t a = 0; a < active.size(); ++a) {
      const int mode = active[a];
      const double alpha = cfg.alpha[static_cast<std::size_t>(mode)];
      const double tau = alpha / cfg.beta;
      TensorXd arg(y.shape());
      arg.data() = xNew.data() + lambda[a].data() / cfg.beta;
      const auto u = unfold(arg, mode + 1);
      const Eigen::VectorXd omega =
          weighted ? logdetWeights(prevSigma[a],
                                   cfg.epsilon[static_cast<std::size_t>(mode)])
                   : Eigen::VectorXd::Ones(prevSigma[a].size());
      SvtResult res = shrinkWithValues(u.matrix, tau, omega);
      m[a] = fold(res.matrix, mode + 1, y.shape());
      prevSigma[a] = res.singularValues;
      lambda[a].data() += cfg.beta * (xNew.data() - m[a].data());
    }

    x = std::move(xNew);
    trace.iterations = k;
    if (k >= 2 && rel < cfg.tol) {
      trace.converged = true;
      break;
    }
  }

  for (Eigen::Index p = 0; p < x.size(); ++p)
    if (!std::isfinite(x[p]))
      throw NumericError("solver produced a non-finite value");
  return {std::move(x), std::move(trace)};
}

}  // namespace

std::pair<TensorXd, SolverTrace> admmComplete(const PatchGroup& group,
                                              const SolverConfig& cfg) {
  return admmCore(group.values, group.mask, cfg, /*weighted=*/true);
}

std::pair<TensorXd, SolverTrace> halrtcComplete(const TensorXd& values,
                                                const TensorXb& mask,
                                                const SolverConfig& cfg) {
  return admmCore(values, mask, cfg, /*weighted=*/false);
}

}  // namespace nllrtc
