#include "nllrtc/container.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nllrtc/errors.hpp"

namespace nllrtc {

namespace {

constexpr char kMagic[4] = {'M', 'T', 'R', 'S'};
constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 4 * 4 + 4;

void putU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void putU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8)
    out.push_back(static_cast<std::uint8_t>((v >> s) & 0xff));
}

void putF32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  putU32(out, bits);
}

std::uint16_t getU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t getU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

float getF32(const std::uint8_t* p) {
  const std::uint32_t bits = getU32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::vector<std::uint8_t> header(std::uint8_t kind, const Shape& shape,
                                 float valueRange) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  putU16(out, kContainerVersion);
  out.push_back(kind);
  for (Eigen::Index d : shape) putU32(out, static_cast<std::uint32_t>(d));
  putF32(out, valueRange);
  return out;
}

void writeFile(const std::filesystem::path& path,
               const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<std::uint8_t> readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw DataError("read failed: " + path.string());
  return bytes;
}

// Payload index for (i, j, k, l): l slowest, then k, then i, then j fastest.
inline Eigen::Index payloadIndex(Eigen::Index i, Eigen::Index j, Eigen::Index k,
                                 Eigen::Index l, Eigen::Index m, Eigen::Index n,
                                 Eigen::Index b) {
  return ((l * b + k) * m + i) * n + j;
}

}  // namespace

void saveContainer(const std::filesystem::path& path, const ImageStack& stack) {
  const Eigen::Index m = stack.height, n = stack.width, b = stack.bands,
                     t = stack.times;
  std::vector<std::uint8_t> bytes =
      header(0, {m, n, b, t}, static_cast<float>(stack.valueRange));
  bytes.reserve(bytes.size() + static_cast<std::size_t>(m * n * b * t) * 4);
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          putF32(bytes, static_cast<float>(stack.values(i, j, k, l)));
  writeFile(path, bytes);
}

void saveContainer(const std::filesystem::path& path,
                   const ObservationMask& mask, double valueRange) {
  const Shape& s = mask.values.shape();
  const Eigen::Index m = s[0], n = s[1], b = s[2], t = s[3];
  std::vector<std::uint8_t> bytes =
      header(1, s, static_cast<float>(valueRange));
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          bytes.push_back(mask.values(i, j, k, l));
  writeFile(path, bytes);
}

ContainerPayload loadContainer(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = readFile(path);
  if (bytes.size() < kHeaderSize)
    throw DataError("truncated header at byte offset " +
                    std::to_string(bytes.size()) + ": " + path.string());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw DataError("bad magic at byte offset 0: " + path.string());
  const std::uint16_t version = getU16(bytes.data() + 4);
  if (version != kContainerVersion)
    throw DataError("unsupported version at byte offset 4: " + path.string());
  const std::uint8_t kind = bytes[6];
  if (kind > 1)
    throw DataError("unknown payload kind at byte offset 6: " + path.string());

  Shape shape(4);
  for (int d = 0; d < 4; ++d) {
    shape[static_cast<std::size_t>(d)] =
        static_cast<Eigen::Index>(getU32(bytes.data() + 7 + 4 * d));
    if (shape[static_cast<std::size_t>(d)] < 1)
      throw DataError("invalid dimension at byte offset " +
                      std::to_string(7 + 4 * d) + ": " + path.string());
  }
  const float valueRange = getF32(bytes.data() + 23);
  const Eigen::Index m = shape[0], n = shape[1], b = shape[2], t = shape[3];
  const Eigen::Index count = numElements(shape);
  const std::size_t elemSize = kind == 0 ? 4 : 1;
  const std::size_t expected =
      kHeaderSize + static_cast<std::size_t>(count) * elemSize;
  if (bytes.size() != expected)
    throw DataError("truncated payload at byte offset " +
                    std::to_string(bytes.size()) + " (expected " +
                    std::to_string(expected) + "): " + path.string());

  const std::uint8_t* payload = bytes.data() + kHeaderSize;
  if (kind == 0) {
    ImageStack stack;
    stack.height = m;
    stack.width = n;
    stack.bands = b;
    stack.times = t;
    stack.valueRange = valueRange;
    stack.values = TensorXd(shape);
    for (Eigen::Index l = 0; l < t; ++l)
      for (Eigen::Index k = 0; k < b; ++k)
        for (Eigen::Index i = 0; i < m; ++i)
          for (Eigen::Index j = 0; j < n; ++j)
            stack.values(i, j, k, l) =
                getF32(payload + payloadIndex(i, j, k, l, m, n, b) * 4);
    return stack;
  }
  ObservationMask mask;
  mask.values = TensorXb(shape);
  for (Eigen::Index l = 0; l < t; ++l)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const Eigen::Index p = payloadIndex(i, j, k, l, m, n, b);
          const std::uint8_t v = payload[p];
          if (v > 1)
            throw DataError("non-binary mask byte at byte offset " +
                            std::to_string(kHeaderSize + static_cast<std::size_t>(p)) +
                            ": " + path.string());
          mask.values(i, j, k, l) = v;
        }
  return mask;
}

ImageStack loadStack(const std::filesystem::path& path) {
  ContainerPayload payload = loadContainer(path);
  if (auto* stack = std::get_if<ImageStack>(&payload)) return std::move(*stack);
  throw DataError("expected a values container: " + path.string());
}

ObservationMask loadMask(const std::filesystem::path& path) {
  ContainerPayload payload = loadContainer(path);
  if (auto* mask = std::get_if<ObservationMask>(&payload))
    return std::move(*mask);
  throw DataError("expected a mask container: " + path.string());
}

void exportBands(const ImageStack& stack, Eigen::Index time,
                 const std::filesystem::path& dir) {
  if (time < 0 || time >= stack.times) throw DataError("time index out of range");
  std::filesystem::create_directories(dir);
  for (Eigen::Index k = 0; k < stack.bands; ++k) {
    const std::filesystem::path path =
        dir / ("band_" + std::to_string(k) + ".pgm");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "P5\n" << stack.width << " " << stack.height << "\n65535\n";
    for (Eigen::Index i = 0; i < stack.height; ++i)
      for (Eigen::Index j = 0; j < stack.width; ++j) {
        const double scaled =
            stack.values(i, j, k, time) / stack.valueRange * 65535.0;
        const auto q = static_cast<std::uint16_t>(std::lround(scaled));
        // PGM samples above 255 are big-endian
        out.put(static_cast<char>(q >> 8));
        out.put(static_cast<char>(q & 0xff));
      }
    if (!out) throw DataError("write failed: " + path.string());
  }
}

ImageStack importBands(const std::filesystem::path& dir, Eigen::Index height,
                       Eigen::Index width, Eigen::Index bands,
                       double valueRange) {
  ImageStack stack;
  stack.height = height;
  stack.width = width;
  stack.bands = bands;
  stack.times = 1;
  stack.valueRange = valueRange;
  stack.values = TensorXd({height, width, bands, Eigen::Index{1}});

  for (Eigen::Index k = 0; k < bands; ++k) {
    const std::filesystem::path path =
        dir / ("band_" + std::to_string(k) + ".pgm");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing band file: " + path.string());
    std::string magic;
    Eigen::Index w = 0, h = 0;
    long maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || maxval != 65535)
      throw DataError("unsupported graymap format: " + path.string());
    if (w != width || h != height)
      throw DataError("band dimensions mismatch: " + path.string());
    in.get();  // single whitespace after the header
    for (Eigen::Index i = 0; i < height; ++i)
      for (Eigen::Index j = 0; j < width; ++j) {
        const int hi = in.get(), lo = in.get();
        if (hi < 0 || lo < 0)
          throw DataError("truncated graymap: " + path.string());
        const double q = static_cast<double>((hi << 8) | lo);
        stack.values(i, j, k, Eigen::Index{0}) = q / 65535.0 * valueRange;
      }
  }
  return stack;
}

}  // namespace nllrtc
