#pragma once

// Per-element codec over whole arrays.  Elements are independent, so the
// default kernels run the loop with OpenMP; the *_serial variants are the
// reference the parallel ones must match byte for byte.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scda/codec.hpp"
#include "scda/count.hpp"

namespace scda {

std::vector<CompressedElement> compress_elements(std::span<const std::string_view> elements,
                                                 LineStyle style, int level);
std::vector<CompressedElement> compress_elements_serial(std::span<const std::string_view> elements,
                                                        LineStyle style, int level);

/// On failure rethrows the error of the lowest failing index, as the serial
/// loop would.
std::vector<std::string> decompress_elements(std::span<const std::string_view> armored);
std::vector<std::string> decompress_elements_serial(std::span<const std::string_view> armored);

/// Views of n elements of e bytes each.  Throws LengthError on mismatch.
std::vector<std::string_view> split_fixed(std::string_view payload, std::uint64_t n, std::uint64_t e);

/// Views of consecutive elements with the given sizes.
std::vector<std::string_view> split_sizes(std::string_view payload, std::span<const std::uint64_t> sizes);
std::vector<std::string_view> split_sizes(std::string_view payload, std::span<const Count> sizes);

/// Number of threads the parallel kernels would use.
int kernel_threads();

}  // namespace scda
