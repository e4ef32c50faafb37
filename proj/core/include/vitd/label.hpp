#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace vitd {

/// Three-way violence label. The integer codes are the dataset's wire values.
enum class LabelClass : std::uint8_t {
    NonViolence = 0,
    PassiveViolence = 1,
    DirectViolence = 2,
};

inline constexpr std::size_t kNumClasses = 3;

inline constexpr std::array<LabelClass, kNumClasses> kAllLabels = {
    LabelClass::NonViolence, LabelClass::PassiveViolence, LabelClass::DirectViolence};

constexpr int label_code(LabelClass label) noexcept { return static_cast<int>(label); }
constexpr std::size_t label_index(LabelClass label) noexcept {
    return static_cast<std::size_t>(label);
}

/// Returns nullopt for any code outside {0, 1, 2}.
constexpr std::optional<LabelClass> label_from_code(long long code) noexcept {
    if (code < 0 || code >= static_cast<long long>(kNumClasses)) return std::nullopt;
    return static_cast<LabelClass>(code);
}

/// Parses the exact strings "0", "1" or "2".
std::optional<LabelClass> parse_label(std::string_view text) noexcept;

std::string_view label_name(LabelClass label) noexcept;

} // namespace vitd
