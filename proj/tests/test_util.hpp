#ifndef NLLRTC_TESTS_TEST_UTIL_HPP_
#define NLLRTC_TESTS_TEST_UTIL_HPP_

#include <random>

#include "nllrtc/rearrange.hpp"
#include "nllrtc/tensor.hpp"

namespace testutil {

inline nllrtc::TensorXd randomTensor(const nllrtc::Shape& shape,
                                     std::mt19937_64& rng, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  nllrtc::TensorXd t(shape);
  for (Eigen::Index p = 0; p < t.size(); ++p) t[p] = dist(rng);
  return t;
}

/// Random tensor whose entries are exactly representable as float32, for
/// bit-exact container roundtrips.
inline nllrtc::TensorXd randomFloatTensor(const nllrtc::Shape& shape,
                                          std::mt19937_64& rng, double lo = 0.0,
                                          double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  nllrtc::TensorXd t(shape);
  for (Eigen::Index p = 0; p < t.size(); ++p)
    t[p] = static_cast<double>(static_cast<float>(dist(rng)));
  return t;
}

inline nllrtc::TensorXb randomMask(const nllrtc::Shape& shape,
                                   std::mt19937_64& rng,
                                   double missingFraction) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  nllrtc::TensorXb m(shape);
  for (Eigen::Index p = 0; p < m.size(); ++p)
    m[p] = dist(rng) < missingFraction ? 0 : 1;
  return m;
}

inline nllrtc::TensorXb onesMask(const nllrtc::Shape& shape) {
  nllrtc::TensorXb m(shape);
  for (Eigen::Index p = 0; p < m.size(); ++p) m[p] = 1;
  return m;
}

inline nllrtc::ImageStack makeStack(nllrtc::TensorXd values,
                                    double valueRange = 255.0) {
  nllrtc::ImageStack s;
  s.height = values.dim(0);
  s.width = values.dim(1);
  s.bands = values.dim(2);
  s.times = values.dim(3);
  s.values = std::move(values);
  s.valueRange = valueRange;
  return s;
}

}  // namespace testutil

#endif  // NLLRTC_TESTS_TEST_UTIL_HPP_
