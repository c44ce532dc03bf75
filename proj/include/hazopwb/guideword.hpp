#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hazopwb {

// The operative guideword set for perception analysis. Order matters: it is
// the declaration order used when enumerating deviation cells. Before/After
// are deliberately absent (ordering of scene elements is not part of the
// world model being analysed).
enum class Guideword : std::uint8_t {
    NoOrNot = 0,
    More,
    Less,
    AsWellAs,
    PartOf,
    OtherThanInstead,
    Reverse,
    Early,
    Late,
    Intermittent,
};

inline constexpr std::size_t kGuidewordCount = 10;

constexpr std::array<Guideword, kGuidewordCount> all_guidewords() {
    return {Guideword::NoOrNot,  Guideword::More,    Guideword::Less,
            Guideword::AsWellAs, Guideword::PartOf,  Guideword::OtherThanInstead,
            Guideword::Reverse,  Guideword::Early,   Guideword::Late,
            Guideword::Intermittent};
}

// Display label, e.g. "No or Not".
std::string_view guideword_label(Guideword g);

// Stable lower_snake_case token used in JSON documents, e.g. "no_or_not".
std::string_view guideword_token(Guideword g);

// Interpretation of the guideword against a perception parameter.
std::string_view guideword_interpretation(Guideword g);

// Accepts either the token or the display label; empty optional if unknown.
std::optional<Guideword> parse_guideword(std::string_view text);

// The classical process-industry guideword table, kept for reference and
// for documentation renders. Not used by the analysis itself.
struct ClassicalGuideword {
    std::string_view label;
    std::string_view meaning;
};

inline constexpr std::size_t kClassicalGuidewordCount = 11;

const std::array<ClassicalGuideword, kClassicalGuidewordCount>& classical_guidewords();

} // namespace hazopwb
