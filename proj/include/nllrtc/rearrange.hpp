#ifndef NLLRTC_REARRANGE_HPP_
#define NLLRTC_REARRANGE_HPP_

#include <cstdint>

#include "nllrtc/tensor.hpp"

namespace nllrtc {

/// Multitemporal multispectral stack, shape (m, n, b, t).
struct ImageStack {
  Eigen::Index height = 0;  // m
  Eigen::Index width = 0;   // n
  Eigen::Index bands = 0;   // b
  Eigen::Index times = 0;   // t
  TensorXd values;
  double valueRange = 255.0;

  void validate() const;
};

/// Binary tensor congruent to its stack: 1 = observed, 0 = missing.
/// Entries at a fixed (i,j,l) agree across all bands.
struct ObservationMask {
  TensorXb values;

  void validate() const;
  /// Checks the cross-band consistency invariant.
  bool bandConsistent() const;
};

/// 3-order reshaping (m, t*n, b) of a stack: the t temporal samples of
/// original column j occupy contiguous columns j*t .. j*t + t - 1.
struct WorkingTensor {
  TensorXd values;
  TensorXb mask;
  Eigen::Index srcHeight = 0, srcWidth = 0, srcBands = 0, srcTimes = 0;

  Eigen::Index rows() const { return values.dim(0); }
  Eigen::Index cols() const { return values.dim(1); }
  Eigen::Index bands() const { return values.dim(2); }
};

WorkingTensor rearrangeForward(const ImageStack& stack,
                               const ObservationMask& mask);

std::pair<ImageStack, ObservationMask> rearrangeInverse(
    const WorkingTensor& w, double valueRange = 255.0);

}  // namespace nllrtc

#endif  // NLLRTC_REARRANGE_HPP_
