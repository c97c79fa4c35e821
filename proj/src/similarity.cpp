#include "nllrtc/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "nllrtc/errors.hpp"

namespace nllrtc {

void SearchConfig::validate(Eigen::Index times) const {
  if (patchWidth < 1 || patchWidth % times != 0)
    throw DataError("patch width must be a positive multiple of t");
  if (radius < 1) throw DataError("search radius must be positive");
  if (step < 1) throw DataError("search step must be positive");
  if (gamma2 <= 0.0 || gamma2 > 1.0)
    throw DataError("gamma2 must lie in (0,1]");
  if (minGroupSize < 1) throw DataError("minGroupSize must be positive");
  if (minJointFraction <= 0.0 || minJointFraction > 1.0)
    throw DataError("minJointFraction must lie in (0,1]");
}

MaskedPatch extractPatch(const WorkingTensor& w, PatchRef ref,
                         Eigen::Index width) {
  if (ref.row < 0 || ref.col < 0 || ref.row + width > w.rows() ||
      ref.col + width > w.cols())
    throw DataError("patch does not fit inside the working tensor");
  MaskedPatch p;
  p.values = TensorXd({width, width, w.bands()});
  p.mask = TensorXb({width, width, w.bands()});
  for (Eigen::Index k = 0; k < w.bands(); ++k)
    for (Eigen::Index c = 0; c < width; ++c)
      for (Eigen::Index r = 0; r < width; ++r) {
        p.values(r, c, k) = w.values(ref.row + r, ref.col + c, k);
        p.mask(r, c, k) = w.mask(ref.row + r, ref.col + c, k);
      }
  return p;
}

std::optional<double> ncc(const MaskedPatch& a, const MaskedPatch& b,
                          double minJointFraction) {
  if (a.values.shape() != b.values.shape())
    throw DataError("ncc patches must have the same shape");
  const Eigen::Index n = a.values.size();

  Eigen::Index joint = 0;
  double sumA = 0.0, sumB = 0.0;
  for (Eigen::Index p = 0; p < n; ++p)
    if (a.mask[p] && b.mask[p]) {
      ++joint;
      sumA += a.values[p];
      sumB += b.values[p];
    }
  if (static_cast<double>(joint) < minJointFraction * static_cast<double>(n))
    return std::nullopt;

  const double muA = sumA / static_cast<double>(joint);
  const double muB = sumB / static_cast<double>(joint);
  double cross = 0.0, varA = 0.0, varB = 0.0;
  for (Eigen::Index p = 0; p < n; ++p)
    if (a.mask[p] && b.mask[p]) {
      const double da = a.values[p] - muA;
      const double db = b.values[p] - muB;
      cross += da * db;
      varA += da * da;
      varB += db * db;
    }
  if (varA == 0.0 || varB == 0.0) return std::nullopt;
  return cross / (std::sqrt(varA) * std::sqrt(varB));
}

std::vector<PatchRef> searchSimilar(const WorkingTensor& w, PatchRef target,
                                    const SearchConfig& cfg) {
  cfg.validate(w.srcTimes);
  const Eigen::Index width = cfg.patchWidth;
  const Eigen::Index t = w.srcTimes;
  if (target.col % t != 0)
    throw DataError("target anchor is not aligned to a temporal block");

  const MaskedPatch targetPatch = extractPatch(w, target, width);

  if (!ncc(targetPatch, targetPatch, cfg.minJointFraction))
    throw DegenerateGroupError("target patch cannot seed a similarity search");

  struct Candidate {
    PatchRef ref;
    double score;
  };
  std::vector<Candidate> defined;  // in scan order
  Eigen::Index scanned = 0;

  for (Eigen::Index r = target.row - cfg.radius; r <= target.row + cfg.radius;
       r += cfg.step) {
    if (r < 0 || r + width > w.rows()) continue;
    for (Eigen::Index c = target.col - cfg.radius; c <= target.col + cfg.radius;
         c += cfg.step) {
      if (c < 0 || c + width > w.cols() || c % t != 0) continue;
      PatchRef ref{r, c};
      if (ref == target) continue;
      ++scanned;
      const MaskedPatch candidate = extractPatch(w, ref, width);
      const auto score = ncc(targetPatch, candidate, cfg.minJointFraction);
      if (score) defined.push_back({ref, *score});
    }
  }

  if (defined.empty() && scanned > 0)
    throw DegenerateGroupError(
        "no candidate with a defined similarity besides the target");

  std::vector<PatchRef> result{target};
  std::vector<Candidate> qualified;
  for (const Candidate& c : defined)
    if (c.score >= cfg.gamma2) qualified.push_back(c);

  if (static_cast<Eigen::Index>(qualified.size()) + 1 >= cfg.minGroupSize) {
    for (const Candidate& c : qualified) result.push_back(c.ref);
  } else {
    // Backfill with the best-scoring defined candidates; stable sort keeps
    // scan order on ties.
    std::vector<Candidate> ranked = defined;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.score > b.score;
                     });
    const std::size_t want = static_cast<std::size_t>(
        std::min<Eigen::Index>(cfg.minGroupSize - 1,
                               static_cast<Eigen::Index>(ranked.size())));
    for (std::size_t k = 0; k < want; ++k) result.push_back(ranked[k].ref);
  }
  return result;
}

PatchGroup groupPatches(const WorkingTensor& w,
                        const std::vector<PatchRef>& refs, Eigen::Index width,
                        std::size_t targetIndex) {
  if (refs.empty()) throw DataError("patch group needs at least one member");
  if (targetIndex >= refs.size()) throw DataError("targetIndex out of range");
  const Eigen::Index b = w.bands();
  const Eigen::Index n = static_cast<Eigen::Index>(refs.size());

  PatchGroup g;
  g.members = refs;
  g.targetIndex = targetIndex;
  g.values = TensorXd({width, width, b, n});
  g.mask = TensorXb({width, width, b, n});
  for (Eigen::Index p = 0; p < n; ++p) {
    const MaskedPatch patch =
        extractPatch(w, refs[static_cast<std::size_t>(p)], width);
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index c = 0; c < width; ++c)
        for (Eigen::Index r = 0; r < width; ++r) {
          g.values(r, c, k, p) = patch.values(r, c, k);
          g.mask(r, c, k, p) = patch.mask(r, c, k);
        }
  }
  return g;
}

}  // namespace nllrtc
