#ifndef NLLRTC_SIMILARITY_HPP_
#define NLLRTC_SIMILARITY_HPP_

#include <optional>
#include <vector>

#include "nllrtc/rearrange.hpp"
#include "nllrtc/tensor.hpp"

namespace nllrtc {

/// Raised when a target has no candidate with a defined similarity besides
/// itself; the pipeline defers such targets.
class DegenerateGroupError : public std::runtime_error {
 public:
  explicit DegenerateGroupError(const std::string& what)
      : std::runtime_error(what) {}
};

/// 0-based top-left anchor of a patch in the working tensor.
struct PatchRef {
  Eigen::Index row = 0;
  Eigen::Index col = 0;

  bool operator==(const PatchRef&) const = default;
};

struct SearchConfig {
  Eigen::Index patchWidth = 4;   // w, multiple of t
  Eigen::Index radius = 100;     // r
  Eigen::Index step = 2;
  double gamma2 = 0.91;          // similarity admission threshold
  Eigen::Index minGroupSize = 10;
  double minJointFraction = 0.5;  // required joint observed coverage for ncc

  void validate(Eigen::Index times) const;
};

/// Similar patches stacked along the fourth mode, shape (w, w, b, n).
struct PatchGroup {
  TensorXd values;
  TensorXb mask;
  std::vector<PatchRef> members;
  std::size_t targetIndex = 0;
};

/// A patch with its observation mask, shape (w, w, b).
struct MaskedPatch {
  TensorXd values;
  TensorXb mask;
};

MaskedPatch extractPatch(const WorkingTensor& w, PatchRef ref,
                         Eigen::Index width);

/// Normalized cross-correlation over the jointly observed entries, with
/// means restricted to that set. Empty when the joint coverage is below
/// minJointFraction or either variance vanishes.
std::optional<double> ncc(const MaskedPatch& a, const MaskedPatch& b,
                          double minJointFraction = 0.5);

/// Scans the window of radius cfg.radius around the target for patches with
/// ncc >= gamma2. The target is always first in the returned list. When
/// fewer than minGroupSize anchors qualify, the best-ncc candidates are
/// backfilled up to minGroupSize.
std::vector<PatchRef> searchSimilar(const WorkingTensor& w, PatchRef target,
                                    const SearchConfig& cfg);

PatchGroup groupPatches(const WorkingTensor& w,
                        const std::vector<PatchRef>& refs, Eigen::Index width,
                        std::size_t targetIndex = 0);

}  // namespace nllrtc

#endif  // NLLRTC_SIMILARITY_HPP_
