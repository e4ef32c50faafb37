#include "vitd/random.hpp"

#include "vitd/error.hpp"

#include <limits>

namespace vitd {

std::uint64_t DeterministicRng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw ArgumentError("uniform_below: bound must be positive");
    // Rejection sampling: discard the top partial block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = m_engine();
    while (draw >= limit) draw = m_engine();
    return draw % bound;
}

double DeterministicRng::uniform_unit() {
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

} // namespace vitd
