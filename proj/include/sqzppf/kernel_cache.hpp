#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sqzppf/squeezed_field.hpp"

namespace sqzppf {

/// Binary file: magic "SQZK", version, key, scales, both grids, then column-major
/// complex values as little-endian doubles and a trailing FNV-1a checksum.
std::string kernel_cache_path(const std::string& directory, std::uint64_t key);

void cache_kernel(const RotatedKernelM& kernel, std::uint64_t key, const std::string& directory);

/// Missing, mismatched or corrupt files are a miss.
std::optional<RotatedKernelM> load_kernel(std::uint64_t key, const std::string& directory);

}  // namespace sqzppf
