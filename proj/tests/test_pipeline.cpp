#include <doctest.h>

#include <cmath>
#include <random>

#include "nllrtc/errors.hpp"
#include "nllrtc/pipeline.hpp"
#include "test_util.hpp"

using namespace nllrtc;

namespace {

// 16x12x2x2 stack tiling a fixed 4x2 texture, constant over time, so every
// aligned patch of the working tensor is an exact copy of every other.
ImageStack tiledScene() {
  const Eigen::Index m = 16, n = 12, b = 2, t = 2;
  TensorXd values({m, n, b, t});
  const double texture[4][2] = {{60.0, 210.0}, {140.0, 90.0},
                                {250.0, 120.0}, {30.0, 180.0}};
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          values(i, j, k, l) = texture[i % 4][j % 2] + 5.0 * static_cast<double>(k);
  return testutil::makeStack(std::move(values));
}

ObservationMask fullMask(const Shape& shape) {
  ObservationMask m;
  m.values = testutil::onesMask(shape);
  return m;
}

// Marks pixel (i, j) missing at time l across all bands.
void hidePixel(ObservationMask& mask, Eigen::Index i, Eigen::Index j,
               Eigen::Index l) {
  for (Eigen::Index k = 0; k < mask.values.dim(2); ++k)
    mask.values(i, j, k, l) = 0;
}

PipelineConfig smallSceneConfig() {
  PipelineConfig cfg;
  cfg.search.radius = 30;
  return cfg;
}

}  // namespace

TEST_CASE("fully observed stack passes through unchanged") {
  const ImageStack stack = tiledScene();
  const ObservationMask mask = fullMask(stack.values.shape());
  const auto [out, report] = inpaint(stack, mask, smallSceneConfig());
  CHECK(out.values == stack.values);
  CHECK(report.groupsProcessed == 0);
  CHECK(report.missingBefore == 0);
  CHECK(report.missingAfter == 0);
  CHECK_FALSE(report.usedHalrtcFallback);
}

TEST_CASE("single hidden pixel in a repeating scene is restored") {
  const ImageStack stack = tiledScene();
  ObservationMask mask = fullMask(stack.values.shape());
  hidePixel(mask, 5, 3, 0);

  const auto [out, report] = inpaint(stack, mask, smallSceneConfig());

  CHECK(report.missingBefore == 2);  // two bands of one pixel
  CHECK(report.missingAfter == 0);
  CHECK(report.groupsProcessed == 1);
  for (Eigen::Index k = 0; k < 2; ++k)
    CHECK(out.values(5, 3, k, Eigen::Index{0}) ==
          doctest::Approx(stack.values(5, 3, k, Eigen::Index{0}))
              .epsilon(0.02));

  // every originally observed entry is untouched, bit for bit
  for (Eigen::Index p = 0; p < stack.values.size(); ++p)
    if (mask.values[p]) CHECK(out.values[p] == stack.values[p]);
}

TEST_CASE("scattered hidden pixels across times are all restored") {
  const ImageStack stack = tiledScene();
  ObservationMask mask = fullMask(stack.values.shape());
  hidePixel(mask, 2, 1, 0);
  hidePixel(mask, 9, 7, 1);
  hidePixel(mask, 14, 10, 0);
  hidePixel(mask, 0, 0, 1);

  const auto [out, report] = inpaint(stack, mask, smallSceneConfig());

  CHECK(report.missingBefore == 8);
  CHECK(report.missingAfter == 0);
  CHECK(report.groupsProcessed >= 1);
  for (Eigen::Index p = 0; p < stack.values.size(); ++p) {
    if (mask.values[p]) {
      CHECK(out.values[p] == stack.values[p]);
    } else {
      CHECK(out.values[p] == doctest::Approx(stack.values[p]).epsilon(0.02));
    }
  }
}

TEST_CASE("pipeline output is deterministic") {
  const ImageStack stack = tiledScene();
  ObservationMask mask = fullMask(stack.values.shape());
  hidePixel(mask, 5, 3, 0);
  hidePixel(mask, 11, 8, 1);

  const auto [a, ra] = inpaint(stack, mask, smallSceneConfig());
  const auto [b, rb] = inpaint(stack, mask, smallSceneConfig());
  CHECK(a.values == b.values);
  CHECK(ra.groupsProcessed == rb.groupsProcessed);
  CHECK(ra.totalSolverIterations == rb.totalSolverIterations);
}

TEST_CASE("constant scene defers every target and completes via fallback") {
  const Eigen::Index m = 8, n = 8, b = 1, t = 2;
  const ImageStack stack =
      testutil::makeStack(TensorXd::Constant({m, n, b, t}, 100.0));
  ObservationMask mask = fullMask(stack.values.shape());
  hidePixel(mask, 3, 4, 0);

  const auto [out, report] = inpaint(stack, mask, smallSceneConfig());

  CHECK(report.deferredTargets >= 1);
  CHECK(report.usedHalrtcFallback);
  CHECK(report.groupsProcessed == 0);
  CHECK(report.missingAfter == 0);
  for (Eigen::Index p = 0; p < stack.values.size(); ++p)
    if (mask.values[p]) CHECK(out.values[p] == stack.values[p]);
}

TEST_CASE("fully hidden patch block is deferred but still completed") {
  const ImageStack stack = tiledScene();
  ObservationMask mask = fullMask(stack.values.shape());
  // hide the aligned working-tensor patch at rows 4..7, cols 8..11: stack
  // pixels (4..7, 4..5) at both times
  for (Eigen::Index i = 4; i < 8; ++i)
    for (Eigen::Index j = 4; j < 6; ++j)
      for (Eigen::Index l = 0; l < 2; ++l) hidePixel(mask, i, j, l);

  const auto [out, report] = inpaint(stack, mask, smallSceneConfig());

  CHECK(report.missingAfter == 0);
  for (Eigen::Index p = 0; p < stack.values.size(); ++p)
    if (mask.values[p]) CHECK(out.values[p] == stack.values[p]);
}

TEST_CASE("input validation") {
  const ImageStack stack = tiledScene();

  ObservationMask empty;
  empty.values = TensorXb(stack.values.shape());  // all missing
  CHECK_THROWS_AS(inpaint(stack, empty, smallSceneConfig()), DataError);

  ObservationMask wrongShape;
  wrongShape.values = testutil::onesMask({4, 4, 2, 2});
  CHECK_THROWS_AS(inpaint(stack, wrongShape, smallSceneConfig()), DataError);

  PipelineConfig bad = smallSceneConfig();
  bad.search.patchWidth = 5;  // not a multiple of t=2
  const ObservationMask mask = fullMask(stack.values.shape());
  CHECK_THROWS_AS(inpaint(stack, mask, bad), DataError);
}
