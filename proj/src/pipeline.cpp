#include "nllrtc/pipeline.hpp"

#include <chrono>
#include <set>

#include "nllrtc/errors.hpp"

namespace nllrtc {

namespace {

Eigen::Index countMissing(const TensorXb& mask) {
  Eigen::Index missing = 0;
  for (Eigen::Index p = 0; p < mask.size(); ++p)
    if (!mask[p]) ++missing;
  return missing;
}

// First (row, col) in row-major order with any band missing, skipping seeds
// already deferred. Returns false when no such pixel exists.
bool findSeed(const WorkingTensor& w,
              const std::set<std::pair<Eigen::Index, Eigen::Index>>& deferred,
              std::pair<Eigen::Index, Eigen::Index>& seed) {
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index v = 0; v < w.cols(); ++v) {
      bool missing = false;
      for (Eigen::Index k = 0; k < w.bands(); ++k)
        if (!w.mask(i, v, k)) {
          missing = true;
          break;
        }
      if (missing && !deferred.contains({i, v})) {
        seed = {i, v};
        return true;
      }
    }
  return false;
}

// Anchor covering the seed: snapped down to the nearest aligned in-bounds
// position.
PatchRef anchorFor(const WorkingTensor& w, Eigen::Index i, Eigen::Index v,
                   Eigen::Index width) {
  const Eigen::Index t = w.srcTimes;
  PatchRef a;
  a.row = std::min(i, w.rows() - width);
  a.col = std::min((v / t) * t, w.cols() - width);
  return a;
}

void writeBackGroup(WorkingTensor& w, const PatchGroup& group,
                    const TensorXd& completed, Eigen::Index width) {
  const Eigen::Index b = w.bands();
  for (std::size_t p = 0; p < group.members.size(); ++p) {
    const PatchRef& ref = group.members[p];
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index c = 0; c < width; ++c)
        for (Eigen::Index r = 0; r < width; ++r) {
          if (!w.mask(ref.row + r, ref.col + c, k)) {
            w.values(ref.row + r, ref.col + c, k) =
                completed(r, c, k, static_cast<Eigen::Index>(p));
            w.mask(ref.row + r, ref.col + c, k) = 1;
          }
        }
  }
}

// Completes every remaining missing entry with the plain nuclear-norm
// solver on a bounding box of the original stack.
void halrtcFallback(WorkingTensor& w, const SolverConfig& cfg) {
  const Eigen::Index m = w.srcHeight, n = w.srcWidth, b = w.srcBands,
                     t = w.srcTimes;
  auto [stack, mask] = rearrangeInverse(w);

  Eigen::Index i0 = m, i1 = -1, j0 = n, j1 = -1;
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          if (!mask.values(i, j, k, l)) {
            i0 = std::min(i0, i);
            i1 = std::max(i1, i);
            j0 = std::min(j0, j);
            j1 = std::max(j1, j);
          }
  if (i1 < 0) return;  // nothing missing

  const Eigen::Index bh = i1 - i0 + 1, bw = j1 - j0 + 1;
  TensorXd boxValues({bh, bw, b, t});
  TensorXb boxMask({bh, bw, b, t});
  bool anyObserved = false;
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < bw; ++j)
        for (Eigen::Index i = 0; i < bh; ++i) {
          boxValues(i, j, k, l) = stack.values(i0 + i, j0 + j, k, l);
          boxMask(i, j, k, l) = mask.values(i0 + i, j0 + j, k, l);
          if (boxMask(i, j, k, l)) anyObserved = true;
        }
  if (!anyObserved) {
    // Degenerate box: fall back to the whole stack.
    boxValues = stack.values;
    boxMask = mask.values;
    i0 = 0;
    j0 = 0;
  }

  auto [completed, trace] = halrtcComplete(boxValues, boxMask, cfg);
  const Eigen::Index ch = completed.dim(0), cw = completed.dim(1);
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < cw; ++j)
        for (Eigen::Index i = 0; i < ch; ++i)
          if (!mask.values(i0 + i, j0 + j, k, l)) {
            const Eigen::Index v = (j0 + j) * t + l;
            w.values(i0 + i, v, k) = completed(i, j, k, l);
            w.mask(i0 + i, v, k) = 1;
          }
}

}  // namespace

std::pair<ImageStack, PipelineReport> inpaint(const ImageStack& stack,
                                              const ObservationMask& mask,
                                              const PipelineConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate(stack.times);

  WorkingTensor w = rearrangeForward(stack, mask);
  PipelineReport report;
  report.missingBefore = countMissing(w.mask);
  if (report.missingBefore == w.mask.size())
    throw DataError("mask has no observed pixel");

  const Eigen::Index width = cfg.search.patchWidth;
  std::set<std::pair<Eigen::Index, Eigen::Index>> deferred;
  Eigen::Index progressSinceClear = 0;

  std::pair<Eigen::Index, Eigen::Index> seed;
  while (true) {
    if (!findSeed(w, deferred, seed)) {
      if (deferred.empty()) break;  // fully completed
      if (progressSinceClear > 0) {
        // Second pass: earlier groups have filled neighbors in.
        deferred.clear();
        progressSinceClear = 0;
        continue;
      }
      report.usedHalrtcFallback = true;
      halrtcFallback(w, cfg.solver);
      break;
    }

    const PatchRef target = anchorFor(w, seed.first, seed.second, width);
    try {
      const std::vector<PatchRef> refs = searchSimilar(w, target, cfg.search);
      const PatchGroup group = groupPatches(w, refs, width, 0);
      auto [completed, trace] = admmComplete(group, cfg.solver);
      writeBackGroup(w, group, completed, width);
      ++report.groupsProcessed;
      report.totalSolverIterations += trace.iterations;
      ++progressSinceClear;
    } catch (const DegenerateGroupError&) {
      deferred.insert(seed);
      ++report.deferredTargets;
    }
  }

  report.missingAfter = countMissing(w.mask);
  auto [outStack, outMask] = rearrangeInverse(w, stack.valueRange);
  (void)outMask;

  report.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return {std::move(outStack), std::move(report)};
}

}  // namespace nllrtc
