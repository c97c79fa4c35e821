#ifndef NLLRTC_METRICS_HPP_
#define NLLRTC_METRICS_HPP_

#include <vector>

#include "nllrtc/rearrange.hpp"

namespace nllrtc {

struct BandQuality {
  double psnr = 0.0;  // +inf when the images are identical
  double ssim = 0.0;
  double q = 0.0;
  double ag = 0.0;
};

struct QualityReport {
  std::vector<BandQuality> perBand;
  BandQuality average;
  bool restrictedToMissing = false;
};

/// 10 log10(N * maxVal^2 / ||ref - x||_F^2); +infinity for identical images.
double psnr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref,
            double maxVal);

/// Global single-window SSIM with c1 = (0.01 maxVal)^2, c2 = (0.03 maxVal)^2.
double ssim(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref,
            double maxVal);

/// s1 (s1 - s2) / (s1 + s2) for the two singular values of the stacked
/// forward-difference gradient matrix; 0 for a constant image.
double metricQ(const Eigen::MatrixXd& x);

double avgGradient(const Eigen::MatrixXd& x);

/// Per-band and band-averaged metrics for time slice t1. When restrictToMissing
/// is set, PSNR and SSIM are computed over the originally missing pixels only;
/// Q and AG always describe the full test image.
QualityReport qualityReport(const ImageStack& test, const ImageStack& reference,
                            Eigen::Index t1,
                            const ObservationMask* mask = nullptr);

/// (original, reconstructed) pairs over all originally missing entries, in
/// lexicographic (i, j, k, l) order with i fastest.
std::vector<std::pair<double, double>> scatterData(const ImageStack& test,
                                                   const ImageStack& reference,
                                                   const ObservationMask& mask);

}  // namespace nllrtc

#endif  // NLLRTC_METRICS_HPP_
