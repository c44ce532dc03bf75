#include "hazopwb/guideword.hpp"

#include <stdexcept>

namespace hazopwb {

namespace {

struct GuidewordRow {
    std::string_view label;
    std::string_view token;
    std::string_view interpretation;
};

constexpr std::array<GuidewordRow, kGuidewordCount> kRows = {{
    {"No or Not", "no_or_not",
     "Failure to identify a relevant element of the scene (false negative)"},
    {"More", "more",
     "Identifying more elements in the scene than are relevant (multiple false positives)"},
    {"Less", "less",
     "Identifying fewer elements in the scene than are relevant (multiple false negatives)"},
    {"As well as", "as_well_as",
     "Identifying element in the scene that is not there (false positive)"},
    {"Part of", "part_of",
     "Failing to identify element in the scene that is there (false negative)"},
    {"Other than/Instead", "other_than_instead",
     "Incorrect classification, e.g. static object rather than pedestrian"},
    {"Reverse", "reverse",
     "Change of sign in a scalar or vector value, e.g. pedestrian is moving towards rather "
     "than away from ego vehicle"},
    {"Early", "early",
     "Object identified earlier than necessary for safe behaviour, perhaps triggering "
     "unnecessary response"},
    {"Late", "late",
     "Object identified later than necessary for safe behaviour"},
    {"Intermittent", "intermittent",
     "Element of scene present in some images, but not in others, or classification changes "
     "from image to image"},
}};

} // namespace

std::string_view guideword_label(Guideword g) {
    return kRows.at(static_cast<std::size_t>(g)).label;
}

std::string_view guideword_token(Guideword g) {
    return kRows.at(static_cast<std::size_t>(g)).token;
}

std::string_view guideword_interpretation(Guideword g) {
    return kRows.at(static_cast<std::size_t>(g)).interpretation;
}

std::optional<Guideword> parse_guideword(std::string_view text) {
    for (std::size_t i = 0; i < kRows.size(); ++i) {
        if (text == kRows[i].token || text == kRows[i].label) {
            return static_cast<Guideword>(i);
        }
    }
    return std::nullopt;
}

const std::array<ClassicalGuideword, kClassicalGuidewordCount>& classical_guidewords() {
    static const std::array<ClassicalGuideword, kClassicalGuidewordCount> rows = {{
        {"No or Not", "Complete negation of the design intent"},
        {"More", "Quantitative increase"},
        {"Less", "Quantitative decrease"},
        {"As well as", "Qualitative modification/increase"},
        {"Part of", "Qualitative modification/decrease"},
        {"Reverse", "Logical opposite of the design intent"},
        {"Other than/Instead", "Complete substitution"},
        {"Early", "Relative to clock time"},
        {"Late", "Relative to clock time"},
        {"Before", "Relating to order or sequence"},
        {"After", "Relating to order or sequence"},
    }};
    return rows;
}

} // namespace hazopwb
