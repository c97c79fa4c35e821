#include "nllrtc/metrics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

#include "nllrtc/errors.hpp"

namespace nllrtc {

namespace {

void checkSameShape(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref) {
  if (x.rows() != ref.rows() || x.cols() != ref.cols())
    throw DataError("image shapes differ");
}

double psnrOver(const std::vector<double>& x, const std::vector<double>& ref,
                double maxVal) {
  double err = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double d = ref[p] - x[p];
    err += d * d;
  }
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(x.size());
  return 10.0 * std::log10(n * maxVal * maxVal / err);
}

double ssimOver(const std::vector<double>& x, const std::vector<double>& ref,
                double maxVal) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, mr = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    mx += x[p];
    mr += ref[p];
  }
  mx /= n;
  mr /= n;
  double vx = 0.0, vr = 0.0, cov = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double dx = x[p] - mx, dr = ref[p] - mr;
    vx += dx * dx;
    vr += dr * dr;
    cov += dx * dr;
  }
  vx /= n;
  vr /= n;
  cov /= n;
  const double c1 = 0.01 * maxVal * 0.01 * maxVal;
  const double c2 = 0.03 * maxVal * 0.03 * maxVal;
  return ((2.0 * mx * mr + c1) * (2.0 * cov + c2)) /
         ((mx * mx + mr * mr + c1) * (vx + vr + c2));
}

std::vector<double> flatten(const Eigen::MatrixXd& x) {
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  Eigen::Map<Eigen::MatrixXd>(out.data(), x.rows(), x.cols()) = x;
  return out;
}

}  // namespace

double psnr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref,
            double maxVal) {
  checkSameShape(x, ref);
  if (maxVal <= 0.0) throw DataError("maxVal must be positive");
  return psnrOver(flatten(x), flatten(ref), maxVal);
}

double ssim(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref,
            double maxVal) {
  checkSameShape(x, ref);
  if (maxVal <= 0.0) throw DataError("maxVal must be positive");
  return ssimOver(flatten(x), flatten(ref), maxVal);
}

double metricQ(const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.rows(), n = x.cols();
  if (m < 2 || n < 2) throw DataError("image too small for metric Q");
  Eigen::MatrixXd g((m - 1) * (n - 1), 2);
  Eigen::Index row = 0;
  for (Eigen::Index j = 0; j + 1 < n; ++j)
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      g(row, 0) = x(i + 1, j) - x(i, j);
      g(row, 1) = x(i, j + 1) - x(i, j);
      ++row;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const double s1 = svd.singularValues()[0];
  const double s2 = svd.singularValues()[1];
  if (s1 + s2 == 0.0) return 0.0;
  return s1 * (s1 - s2) / (s1 + s2);
}

double avgGradient(const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.rows(), n = x.cols();
  if (m < 2 || n < 2) throw DataError("image too small for average gradient");
  double acc = 0.0;
  for (Eigen::Index j = 0; j + 1 < n; ++j)
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      const double d1 = x(i + 1, j) - x(i, j);
      const double d2 = x(i, j + 1) - x(i, j);
      acc += std::sqrt((d1 * d1 + d2 * d2) / 2.0);
    }
  return acc / static_cast<double>((m - 1) * (n - 1));
}

QualityReport qualityReport(const ImageStack& test, const ImageStack& reference,
                            Eigen::Index t1, const ObservationMask* mask) {
  if (test.values.shape() != reference.values.shape())
    throw DataError("test and reference shapes differ");
  if (mask && mask->values.shape() != test.values.shape())
    throw DataError("mask shape differs from the images");
  if (t1 < 0 || t1 >= test.times) throw DataError("time index out of range");

  const Eigen::Index m = test.height, n = test.width, b = test.bands;
  const double maxVal = reference.valueRange;

  QualityReport report;
  report.restrictedToMissing = mask != nullptr;
  for (Eigen::Index k = 0; k < b; ++k) {
    Eigen::MatrixXd xk(m, n), rk(m, n);
    std::vector<double> xs, rs;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) {
        xk(i, j) = test.values(i, j, k, t1);
        rk(i, j) = reference.values(i, j, k, t1);
        if (!mask || !mask->values(i, j, k, t1)) {
          xs.push_back(xk(i, j));
          rs.push_back(rk(i, j));
        }
      }
    BandQuality q;
    q.psnr = xs.empty() ? std::numeric_limits<double>::infinity()
                        : psnrOver(xs, rs, maxVal);
    q.ssim = xs.empty() ? 1.0 : ssimOver(xs, rs, maxVal);
    q.q = metricQ(xk);
    q.ag = avgGradient(xk);
    report.perBand.push_back(q);
  }

  const double nb = static_cast<double>(b);
  for (const BandQuality& q : report.perBand) {
    report.average.psnr += q.psnr / nb;
    report.average.ssim += q.ssim / nb;
    report.average.q += q.q / nb;
    report.average.ag += q.ag / nb;
  }
  return report;
}

std::vector<std::pair<double, double>> scatterData(
    const ImageStack& test, const ImageStack& reference,
    const ObservationMask& mask) {
  if (test.values.shape() != reference.values.shape() ||
      mask.values.shape() != test.values.shape())
    throw DataError("scatter inputs must be congruent");
  std::vector<std::pair<double, double>> pairs;
  const Eigen::Index m = test.height, n = test.width, b = test.bands,
                     t = test.times;
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          if (!mask.values(i, j, k, l))
            pairs.emplace_back(reference.values(i, j, k, l),
                               test.values(i, j, k, l));
  return pairs;
}

}  // namespace nllrtc
