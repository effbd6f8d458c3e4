#include "exactbn/score_buffer.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

namespace exactbn {

std::size_t bytes_per_score(Precision p) { return static_cast<std::size_t>(p); }

Precision parse_precision(std::string_view text) {
  if (text == "4" || text == "single" || text == "f32") return Precision::kSingle;
  if (text == "8" || text == "double" || text == "f64") return Precision::kDouble;
  throw std::invalid_argument("unknown precision '" + std::string(text) + "' (use 4 or 8)");
}

ScoreBuffer::ScoreBuffer(Precision precision, std::size_t size, double fill) : precision_(precision) {
  if (precision_ == Precision::kSingle) {
    single_.assign(size, static_cast<float>(fill));
  } else {
    double_.assign(size, fill);
  }
}

std::span<const std::byte> ScoreBuffer::raw() const {
  return precision_ == Precision::kSingle ? std::as_bytes(std::span(single_)) : std::as_bytes(std::span(double_));
}

std::span<std::byte> ScoreBuffer::raw() {
  return precision_ == Precision::kSingle ? std::as_writable_bytes(std::span(single_))
                                          : std::as_writable_bytes(std::span(double_));
}

bool ScoreBuffer::operator==(const ScoreBuffer& other) const {
  if (precision_ != other.precision_ || size() != other.size()) return false;
  const auto a = raw();
  const auto b = other.raw();
  return std::memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace exactbn
