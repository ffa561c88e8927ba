#include "stancebias/stance.hpp"

#include <cctype>

#include "stancebias/tokenize.hpp"

namespace stancebias {

namespace {

std::string trimmed_lower(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b])) != 0) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1])) != 0) --e;
    return lowercase_ascii(text.substr(b, e - b));
}

} // namespace

std::string to_string(Stance s) {
    return s == Stance::Favor ? "FAVOR" : "AGAINST";
}

std::string to_string(PredictedStance s) {
    switch (s) {
        case PredictedStance::Favor: return "FAVOR";
        case PredictedStance::Against: return "AGAINST";
        case PredictedStance::Neutral: return "NEUTRAL";
    }
    return "NEUTRAL";
}

std::string to_string(PositiveLabel d) {
    return d == PositiveLabel::Favor ? "favor" : "against";
}

std::optional<Stance> stance_from_string(std::string_view text) {
    std::string t = trimmed_lower(text);
    if (t == "favor") return Stance::Favor;
    if (t == "against") return Stance::Against;
    return std::nullopt;
}

std::optional<PredictedStance> predicted_stance_from_string(std::string_view text) {
    std::string t = trimmed_lower(text);
    if (t == "favor") return PredictedStance::Favor;
    if (t == "against") return PredictedStance::Against;
    if (t == "neutral") return PredictedStance::Neutral;
    return std::nullopt;
}

std::optional<PositiveLabel> positive_label_from_string(std::string_view text) {
    std::string t = trimmed_lower(text);
    if (t == "favor") return PositiveLabel::Favor;
    if (t == "against") return PositiveLabel::Against;
    return std::nullopt;
}

} // namespace stancebias
