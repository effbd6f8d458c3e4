#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace exactbn {

/// Storage width of score tables. Values are always computed in double and
/// rounded once when stored.
enum class Precision : std::uint8_t { kSingle = 4, kDouble = 8 };

std::size_t bytes_per_score(Precision p);
Precision parse_precision(std::string_view text);

/// Flat array of scores held as float or double.
class ScoreBuffer {
 public:
  ScoreBuffer() = default;
  ScoreBuffer(Precision precision, std::size_t size, double fill);

  Precision precision() const { return precision_; }
  std::size_t size() const { return precision_ == Precision::kSingle ? single_.size() : double_.size(); }
  std::size_t bytes() const { return size() * bytes_per_score(precision_); }

  double operator[](std::size_t i) const {
    return precision_ == Precision::kSingle ? static_cast<double>(single_[i]) : double_[i];
  }
  void set(std::size_t i, double value) {
    if (precision_ == Precision::kSingle) {
      single_[i] = static_cast<float>(value);
    } else {
      double_[i] = value;
    }
  }

  /// Raw little-endian payload, size() * bytes_per_score() bytes.
  std::span<const std::byte> raw() const;
  std::span<std::byte> raw();

  /// Bitwise equality of the stored representation.
  bool operator==(const ScoreBuffer& other) const;

 private:
  Precision precision_ = Precision::kDouble;
  std::vector<float> single_;
  std::vector<double> double_;
};

}  // namespace exactbn
