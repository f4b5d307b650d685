#pragma once

#include <filesystem>

#include "sbss/mat.hpp"

namespace sbss {

// Binary matrix container: magic "SBSS", u16 version (currently 1), u32 rows,
// u32 cols, then rows*cols doubles row major. All fields little endian.
void writeMatFile(const std::filesystem::path& path, const Mat& m);
Mat readMatFile(const std::filesystem::path& path);

}  // namespace sbss
