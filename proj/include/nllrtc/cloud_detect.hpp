#ifndef NLLRTC_CLOUD_DETECT_HPP_
#define NLLRTC_CLOUD_DETECT_HPP_

#include <cstdint>
#include <vector>

#include "nllrtc/rearrange.hpp"

namespace nllrtc {

struct DetectConfig {
  double thresholdStep = 1.0;   // s; use 1/255 for [0,1] data
  Eigen::Index refineRadius = 3;  // r1, Chebyshev radius of the vote patch
  double majorityFraction = 0.5;

  void validate() const;
};

struct Ellipse {
  double centerRow = 0.0, centerCol = 0.0;
  double radiusRow = 1.0, radiusCol = 1.0;
};

struct DegradationSpec {
  enum class Kind { Cloud, DiagonalStripes, VerticalStripes };
  Kind kind = Kind::Cloud;
  Eigen::Index targetTime = 0;  // t1, 0-based

  std::vector<Ellipse> ellipses;  // cloud geometry

  Eigen::Index stripePeriod = 10;  // stripes
  Eigen::Index stripeWidth = 2;
  Eigen::Index stripeCount = 8;  // random vertical stripes
  std::uint64_t seed = 0;
};

/// Iterative thresholding: scan the brightness cutoff upward and keep the
/// cutoff that maximizes the correlation between the target-time image and
/// the reference-time mean over the still-unflagged pixels. Pixels whose
/// max-over-bands value exceeds the chosen cutoff are flagged at time t1.
ObservationMask thresholdDetect(const ImageStack& stack, Eigen::Index t1,
                                const DetectConfig& cfg);

/// Single-pass KNN-like refinement: a flagged pixel is unflagged when fewer
/// than half of the pixels in its Chebyshev-radius patch are flagged. All
/// decisions read the input mask.
ObservationMask knnRefine(const ObservationMask& mask, Eigen::Index t1,
                          const DetectConfig& cfg);

/// Deterministic synthetic degradation mask (clouds or stripes) covering
/// only the requested target time.
ObservationMask simulateDegradation(const ImageStack& stack,
                                    const DegradationSpec& spec);

}  // namespace nllrtc

#endif  // NLLRTC_CLOUD_DETECT_HPP_
