#include "scda/kernels.hpp"

#include <exception>

#include "scda/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scda {
namespace {

template <typename T>
std::vector<std::string_view> split_impl(std::string_view payload, std::span<const T> sizes) {
  std::vector<std::string_view> out;
  out.reserve(sizes.size());
  std::size_t pos = 0;
  for (T s : sizes) {
    if (s > payload.size() - pos) throw LengthError("element sizes exceed the payload");
    const auto n = static_cast<std::size_t>(s);
    out.push_back(payload.substr(pos, n));
    pos += n;
  }
  if (pos != payload.size()) throw LengthError("element sizes do not cover the payload");
  return out;
}

}  // namespace

std::vector<CompressedElement> compress_elements_serial(std::span<const std::string_view> elements,
                                                        LineStyle style, int level) {
  std::vector<CompressedElement> out;
  out.reserve(elements.size());
  for (std::string_view e : elements) out.push_back(compress_element(e, style, level));
  return out;
}

std::vector<CompressedElement> compress_elements(std::span<const std::string_view> elements,
                                                 LineStyle style, int level) {
  std::vector<CompressedElement> out(elements.size());
  const auto n = static_cast<std::int64_t>(elements.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = compress_element(elements[static_cast<std::size_t>(i)], style, level);
  }
  return out;
}

std::vector<std::string> decompress_elements_serial(std::span<const std::string_view> armored) {
  std::vector<std::string> out;
  out.reserve(armored.size());
  for (std::string_view a : armored) out.push_back(decompress_element(a));
  return out;
}

std::vector<std::string> decompress_elements(std::span<const std::string_view> armored) {
  std::vector<std::string> out(armored.size());
  std::vector<std::exception_ptr> errors(armored.size());
  const auto n = static_cast<std::int64_t>(armored.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = decompress_element(armored[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<std::string_view> split_fixed(std::string_view payload, std::uint64_t n, std::uint64_t e) {
  const auto total = checked_mul(n, e);
  if (!total || *total != payload.size()) throw LengthError("payload is not N*E bytes");
  std::vector<std::string_view> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    out.push_back(payload.substr(static_cast<std::size_t>(i * e), static_cast<std::size_t>(e)));
  }
  return out;
}

std::vector<std::string_view> split_sizes(std::string_view payload, std::span<const std::uint64_t> sizes) {
  return split_impl(payload, sizes);
}

std::vector<std::string_view> split_sizes(std::string_view payload, std::span<const Count> sizes) {
  return split_impl(payload, sizes);
}

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace scda
