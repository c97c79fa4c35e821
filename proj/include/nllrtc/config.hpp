#ifndef NLLRTC_CONFIG_HPP_
#define NLLRTC_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "nllrtc/cloud_detect.hpp"
#include "nllrtc/pipeline.hpp"

namespace nllrtc {

/// Flat key-value run configuration. Every key has a default; unknown keys
/// are rejected.
struct RunConfig {
  PipelineConfig pipeline;
  DetectConfig detect;
  std::uint64_t seed = 0;

  static RunConfig fromFile(const std::filesystem::path& path);
  static RunConfig fromText(const std::string& text);

  /// Every parameter with its resolved value, one `key = value` per line.
  std::string effectiveText() const;
};

DegradationSpec degradationSpecFromFile(const std::filesystem::path& path);
DegradationSpec degradationSpecFromText(const std::string& text);

}  // namespace nllrtc

#endif  // NLLRTC_CONFIG_HPP_
