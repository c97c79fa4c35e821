#ifndef NLLRTC_PIPELINE_HPP_
#define NLLRTC_PIPELINE_HPP_

#include "nllrtc/rearrange.hpp"
#include "nllrtc/similarity.hpp"
#include "nllrtc/solver.hpp"

namespace nllrtc {

struct PipelineConfig {
  SearchConfig search;
  SolverConfig solver;

  void validate(Eigen::Index times) const {
    search.validate(times);
    solver.validate();
  }
};

struct PipelineReport {
  Eigen::Index groupsProcessed = 0;
  Eigen::Index totalSolverIterations = 0;
  Eigen::Index missingBefore = 0;
  Eigen::Index missingAfter = 0;
  Eigen::Index deferredTargets = 0;
  bool usedHalrtcFallback = false;
  double wallSeconds = 0.0;
};

/// Scans the working tensor row-major for missing pixels, reconstructs
/// each target's patch group by ADMM completion, writes recovered values
/// back, and marks them observed until nothing is missing. Originally
/// observed entries are never modified.
std::pair<ImageStack, PipelineReport> inpaint(const ImageStack& stack,
                                              const ObservationMask& mask,
                                              const PipelineConfig& cfg);

}  // namespace nllrtc

#endif  // NLLRTC_PIPELINE_HPP_
