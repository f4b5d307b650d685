#include "sbss/matfile.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace sbss {

namespace {

constexpr char kMagic[4] = {'S', 'B', 'S', 'S'};
constexpr std::uint16_t kVersion = 1;

void putU16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void putU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void putF64(std::vector<unsigned char>& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xff));
}

std::uint16_t getU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t getU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double getF64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void writeMatFile(const std::filesystem::path& path, const Mat& m) {
  if (m.rows() < 1 || m.cols() < 1) throw IoError("matfile: refusing to write empty matrix");
  requireFinite(m, "matfile write");

  std::vector<unsigned char> buf;
  buf.reserve(14 + static_cast<size_t>(m.size()) * 8);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  putU16(buf, kVersion);
  putU32(buf, static_cast<std::uint32_t>(m.rows()));
  putU32(buf, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) putF64(buf, m(i, j));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("matfile: cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("matfile: short write to '" + path.string() + "'");
}

Mat readMatFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("matfile: cannot open '" + path.string() + "'");
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 14) throw IoError("matfile: '" + path.string() + "' truncated header");
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw IoError("matfile: '" + path.string() + "' bad magic");
  if (getU16(buf.data() + 4) != kVersion)
    throw IoError("matfile: '" + path.string() + "' unsupported version");
  const std::uint32_t rows = getU32(buf.data() + 6);
  const std::uint32_t cols = getU32(buf.data() + 10);
  if (rows == 0 || cols == 0) throw IoError("matfile: '" + path.string() + "' empty dimensions");
  const size_t want = 14 + static_cast<size_t>(rows) * cols * 8;
  if (buf.size() != want)
    throw IoError("matfile: '" + path.string() + "' payload size mismatch (have " +
                  std::to_string(buf.size()) + " bytes, want " + std::to_string(want) + ")");

  Mat m(rows, cols);
  const unsigned char* p = buf.data() + 14;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j, p += 8) m(i, j) = getF64(p);
  if (!m.allFinite()) throw IoError("matfile: '" + path.string() + "' non-finite entries");
  return m;
}

}  // namespace sbss
