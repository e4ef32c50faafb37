#include "vitd/label.hpp"

namespace vitd {

std::optional<LabelClass> parse_label(std::string_view text) noexcept {
    if (text.size() != 1) return std::nullopt;
    return label_from_code(static_cast<long long>(text[0]) - '0');
}

std::string_view label_name(LabelClass label) noexcept {
    switch (label) {
    case LabelClass::NonViolence: return "NonViolence";
    case LabelClass::PassiveViolence: return "PassiveViolence";
    case LabelClass::DirectViolence: return "DirectViolence";
    }
    return "?";
}

} // namespace vitd
