#ifndef NLLRTC_CONTAINER_HPP_
#define NLLRTC_CONTAINER_HPP_

#include <filesystem>
#include <string>
#include <variant>

#include "nllrtc/rearrange.hpp"

namespace nllrtc {

// Container layout, all integers little-endian:
//   "MTRS" | version u16 | kind u8 (0 = float32 values, 1 = uint8 mask)
//   | m, n, b, t as u32 | valueRange float32 | payload.
// The payload is ordered time, band, row, column with the column fastest.
inline constexpr std::uint16_t kContainerVersion = 1;

void saveContainer(const std::filesystem::path& path, const ImageStack& stack);
void saveContainer(const std::filesystem::path& path,
                   const ObservationMask& mask, double valueRange = 1.0f);

using ContainerPayload = std::variant<ImageStack, ObservationMask>;

ContainerPayload loadContainer(const std::filesystem::path& path);

ImageStack loadStack(const std::filesystem::path& path);
ObservationMask loadMask(const std::filesystem::path& path);

/// One 16-bit PGM per band of the given time slice, scaled by valueRange.
void exportBands(const ImageStack& stack, Eigen::Index time,
                 const std::filesystem::path& dir);

/// Inverse of exportBands, up to one 16-bit quantization step. Files are
/// expected as band_0.pgm .. band_{b-1}.pgm; the result is a single-time
/// stack.
ImageStack importBands(const std::filesystem::path& dir, Eigen::Index height,
                       Eigen::Index width, Eigen::Index bands,
                       double valueRange);

}  // namespace nllrtc

#endif  // NLLRTC_CONTAINER_HPP_
