#include "nllrtc/cloud_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "nllrtc/errors.hpp"

namespace nllrtc {

void DetectConfig::validate() const {
  if (thresholdStep <= 0.0) throw DataError("threshold step must be positive");
  if (refineRadius < 1) throw DataError("refine radius must be >= 1");
  if (majorityFraction <= 0.0 || majorityFraction >= 1.0)
    throw DataError("majority fraction must lie in (0,1)");
}

namespace {

ObservationMask allOnes(const Shape& shape) {
  ObservationMask mask;
  mask.values = TensorXb(shape);
  for (Eigen::Index p = 0; p < mask.values.size(); ++p) mask.values[p] = 1;
  return mask;
}

// Pearson correlation between target and reference values over the pixels
// selected by `keep`; band values are pooled. Empty when fewer than two
// samples exist or either variance vanishes.
std::optional<double> maskedCorrelation(const ImageStack& stack,
                                        Eigen::Index t1,
                                        const Eigen::MatrixXd& refMean,
                                        const std::vector<std::uint8_t>& keep,
                                        Eigen::Index bands) {
  const Eigen::Index m = stack.height, n = stack.width;
  // refMean rows are blocked by band: entry (i + k*m, j).
  std::vector<double> xs, ys;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!keep[static_cast<std::size_t>(j * m + i)]) continue;
      for (Eigen::Index k = 0; k < bands; ++k) {
        xs.push_back(stack.values(i, j, k, t1));
        ys.push_back(refMean(i + k * m, j));
      }
    }
  if (xs.size() < 2) return std::nullopt;
  const double nd = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    mx += xs[p];
    my += ys[p];
  }
  mx /= nd;
  my /= nd;
  double cross = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const double dx = xs[p] - mx, dy = ys[p] - my;
    cross += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx == 0.0 || vy == 0.0) return std::nullopt;
  return cross / (std::sqrt(vx) * std::sqrt(vy));
}

}  // namespace

ObservationMask thresholdDetect(const ImageStack& stack, Eigen::Index t1,
                                const DetectConfig& cfg) {
  cfg.validate();
  const Eigen::Index m = stack.height, n = stack.width, b = stack.bands,
                     t = stack.times;
  if (t < 2) throw DataError("cloud detection needs at least one reference time");
  if (t1 < 0 || t1 >= t) throw DataError("target time out of range");

  // Per-pixel brightness (max across bands) at the target time, and the
  // per-pixel-per-band mean over the reference times.
  Eigen::MatrixXd bright(m, n);
  Eigen::MatrixXd refMean(m * b, n);  // rows blocked by band: (i + k*m, j)
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      double mx = 0.0;
      for (Eigen::Index k = 0; k < b; ++k) {
        mx = std::max(mx, stack.values(i, j, k, t1));
        double acc = 0.0;
        for (Eigen::Index l = 0; l < t; ++l)
          if (l != t1) acc += stack.values(i, j, k, l);
        refMean(i + k * m, j) = acc / static_cast<double>(t - 1);
      }
      bright(i, j) = mx;
    }
  const double maxBright = bright.maxCoeff();

  std::vector<std::uint8_t> keep(static_cast<std::size_t>(m * n));
  auto fillKeep = [&](double gamma1) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i)
        keep[static_cast<std::size_t>(j * m + i)] =
            bright(i, j) > 0.0 && bright(i, j) <= gamma1;
  };

  double bestF = -std::numeric_limits<double>::infinity();
  double bestGamma = -1.0;
  double prevF = -std::numeric_limits<double>::infinity();
  bool anyDefined = false;

  for (double gamma1 = cfg.thresholdStep;; gamma1 += cfg.thresholdStep) {
    fillKeep(gamma1);
    const auto f = maskedCorrelation(stack, t1, refMean, keep, b);
    if (f) {
      anyDefined = true;
      if (*f < prevF) break;  // strict decrease ends the scan
      if (*f > bestF) {
        bestF = *f;
        bestGamma = gamma1;
      }
      prevF = *f;
    }
    if (gamma1 >= maxBright) break;
  }

  if (!anyDefined)
    throw NumericError("cloud detection undefined: correlation never defined");

  ObservationMask mask = allOnes({m, n, b, t});
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const bool observed = bright(i, j) > 0.0 && bright(i, j) <= bestGamma;
      if (!observed)
        for (Eigen::Index k = 0; k < b; ++k) mask.values(i, j, k, t1) = 0;
    }
  return mask;
}

ObservationMask knnRefine(const ObservationMask& mask, Eigen::Index t1,
                          const DetectConfig& cfg) {
  cfg.validate();
  const Shape& s = mask.values.shape();
  const Eigen::Index m = s[0], n = s[1], b = s[2], t = s[3];
  if (t1 < 0 || t1 >= t) throw DataError("target time out of range");
  if (!mask.bandConsistent())
    throw DataError("mask is not band-consistent");

  ObservationMask out = mask;
  const Eigen::Index r1 = cfg.refineRadius;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mask.values(i, j, Eigen::Index{0}, t1)) continue;  // not flagged
      Eigen::Index flagged = 0, total = 0;
      for (Eigen::Index dj = -r1; dj <= r1; ++dj)
        for (Eigen::Index di = -r1; di <= r1; ++di) {
          const Eigen::Index pi = i + di, pj = j + dj;
          if (pi < 0 || pi >= m || pj < 0 || pj >= n) continue;
          ++total;
          if (!mask.values(pi, pj, Eigen::Index{0}, t1)) ++flagged;
        }
      const double p = static_cast<double>(flagged) / static_cast<double>(total);
      if (p < cfg.majorityFraction)
        for (Eigen::Index k = 0; k < b; ++k) out.values(i, j, k, t1) = 1;
    }
  return out;
}

ObservationMask simulateDegradation(const ImageStack& stack,
                                    const DegradationSpec& spec) {
  const Eigen::Index m = stack.height, n = stack.width, b = stack.bands,
                     t = stack.times;
  if (spec.targetTime < 0 || spec.targetTime >= t)
    throw DataError("degradation target time out of range");

  std::vector<std::uint8_t> flagged(static_cast<std::size_t>(m * n), 0);
  auto flag = [&](Eigen::Index i, Eigen::Index j) {
    flagged[static_cast<std::size_t>(j * m + i)] = 1;
  };

  switch (spec.kind) {
    case DegradationSpec::Kind::Cloud: {
      if (spec.ellipses.empty()) throw DataError("empty cloud geometry");
      for (const Ellipse& e : spec.ellipses) {
        if (e.radiusRow <= 0.0 || e.radiusCol <= 0.0)
          throw DataError("ellipse radii must be positive");
        for (Eigen::Index j = 0; j < n; ++j)
          for (Eigen::Index i = 0; i < m; ++i) {
            const double di = (static_cast<double>(i) - e.centerRow) / e.radiusRow;
            const double dj = (static_cast<double>(j) - e.centerCol) / e.radiusCol;
            if (di * di + dj * dj <= 1.0) flag(i, j);
          }
      }
      break;
    }
    case DegradationSpec::Kind::DiagonalStripes: {
      if (spec.stripePeriod < 1 || spec.stripeWidth < 1 ||
          spec.stripeWidth > spec.stripePeriod)
        throw DataError("invalid stripe geometry");
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          if ((i + j) % spec.stripePeriod < spec.stripeWidth) flag(i, j);
      break;
    }
    case DegradationSpec::Kind::VerticalStripes: {
      if (spec.stripeWidth < 1 || spec.stripeCount < 1)
        throw DataError("invalid stripe geometry");
      std::mt19937_64 rng(spec.seed);
      std::uniform_int_distribution<Eigen::Index> dist(0, n - 1);
      for (Eigen::Index s = 0; s < spec.stripeCount; ++s) {
        const Eigen::Index c0 = dist(rng);
        for (Eigen::Index j = c0; j < std::min(n, c0 + spec.stripeWidth); ++j)
          for (Eigen::Index i = 0; i < m; ++i) flag(i, j);
      }
      break;
    }
  }

  Eigen::Index covered = 0;
  for (std::uint8_t f : flagged) covered += f;
  if (covered == 0) throw DataError("degradation geometry covers no pixel");

  ObservationMask mask = allOnes({m, n, b, t});
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      if (flagged[static_cast<std::size_t>(j * m + i)])
        for (Eigen::Index k = 0; k < b; ++k)
          mask.values(i, j, k, spec.targetTime) = 0;
  return mask;
}

}  // namespace nllrtc
