#include "nllrtc/rearrange.hpp"

#include <cmath>

#include "nllrtc/errors.hpp"

namespace nllrtc {

void ImageStack::validate() const {
  if (values.order() != 4) throw DataError("image stack must be 4-order");
  if (values.dim(0) != height || values.dim(1) != width ||
      values.dim(2) != bands || values.dim(3) != times)
    throw DataError("image stack dims disagree with tensor shape");
  if (valueRange <= 0.0) throw DataError("valueRange must be positive");
  for (Eigen::Index p = 0; p < values.size(); ++p) {
    const double v = values[p];
    if (!std::isfinite(v) || v < 0.0)
      throw DataError("image stack values must be finite and nonnegative");
    if (v > valueRange) throw DataError("image stack value exceeds valueRange");
  }
}

void ObservationMask::validate() const {
  if (values.order() != 4) throw DataError("observation mask must be 4-order");
  for (Eigen::Index p = 0; p < values.size(); ++p)
    if (values[p] > 1) throw DataError("observation mask must be binary");
  if (!bandConsistent())
    throw DataError("observation mask is not band-consistent");
}

bool ObservationMask::bandConsistent() const {
  const Shape& s = values.shape();
  const Eigen::Index m = s[0], n = s[1], b = s[2], t = s[3];
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) {
        const std::uint8_t first = values(i, j, Eigen::Index{0}, l);
        for (Eigen::Index k = 1; k < b; ++k)
          if (values(i, j, k, l) != first) return false;
      }
  return true;
}

namespace {

// One index map shared by values and mask: (i,j,k,l) <-> (u, v, w) with
// u = i, v = j*t + l, w = k (0-based).
template <typename Scalar>
Tensor<Scalar> transportForward(const Tensor<Scalar>& src, Eigen::Index m,
                                Eigen::Index n, Eigen::Index b,
                                Eigen::Index t) {
  Tensor<Scalar> dst({m, t * n, b});
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          dst(i, j * t + l, k) = src(i, j, k, l);
  return dst;
}

template <typename Scalar>
Tensor<Scalar> transportInverse(const Tensor<Scalar>& src, Eigen::Index m,
                                Eigen::Index n, Eigen::Index b,
                                Eigen::Index t) {
  Tensor<Scalar> dst({m, n, b, t});
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          dst(i, j, k, l) = src(i, j * t + l, k);
  return dst;
}

}  // namespace

WorkingTensor rearrangeForward(const ImageStack& stack,
                               const ObservationMask& mask) {
  if (mask.values.shape() != stack.values.shape())
    throw DataError("mask shape not congruent to stack");
  WorkingTensor w;
  w.srcHeight = stack.height;
  w.srcWidth = stack.width;
  w.srcBands = stack.bands;
  w.srcTimes = stack.times;
  w.values = transportForward(stack.values, stack.height, stack.width,
                              stack.bands, stack.times);
  w.mask = transportForward(mask.values, stack.height, stack.width,
                            stack.bands, stack.times);
  return w;
}

std::pair<ImageStack, ObservationMask> rearrangeInverse(const WorkingTensor& w,
                                                        double valueRange) {
  const Eigen::Index m = w.srcHeight, n = w.srcWidth, b = w.srcBands,
                     t = w.srcTimes;
  if (w.values.order() != 3 || w.values.dim(0) != m ||
      w.values.dim(1) != t * n || w.values.dim(2) != b)
    throw DataError("working tensor shape inconsistent with provenance dims");
  if (w.mask.shape() != w.values.shape())
    throw DataError("working tensor mask not congruent to values");

  ImageStack stack;
  stack.height = m;
  stack.width = n;
  stack.bands = b;
  stack.times = t;
  stack.valueRange = valueRange;
  stack.values = transportInverse(w.values, m, n, b, t);

  ObservationMask mask;
  mask.values = transportInverse(w.mask, m, n, b, t);
  return {std::move(stack), std::move(mask)};
}

}  // namespace nllrtc
