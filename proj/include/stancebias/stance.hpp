#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stancebias {

// Gold labels are binary; the source datasets carry no neutral class.
enum class Stance { Favor, Against };

// Model responses may fail to follow the instruction, which we record as
// Neutral.
enum class PredictedStance { Favor, Against, Neutral };

// Which label plays the role of "positive" in a fairness metric.
enum class PositiveLabel { Favor, Against };

std::string to_string(Stance s);
std::string to_string(PredictedStance s);
std::string to_string(PositiveLabel d);

// Case-insensitive; trims surrounding whitespace. Empty optional for
// anything that is not favor/against.
std::optional<Stance> stance_from_string(std::string_view text);
std::optional<PredictedStance> predicted_stance_from_string(std::string_view text);
std::optional<PositiveLabel> positive_label_from_string(std::string_view text);

inline bool is_positive(Stance s, PositiveLabel d) {
    return (d == PositiveLabel::Favor) == (s == Stance::Favor);
}

// Neutral is never positive under either direction.
inline bool is_positive(PredictedStance s, PositiveLabel d) {
    if (s == PredictedStance::Neutral) return false;
    return (d == PositiveLabel::Favor) == (s == PredictedStance::Favor);
}

} // namespace stancebias
