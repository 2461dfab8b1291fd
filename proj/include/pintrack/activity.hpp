#pragma once

#include <string>

namespace pintrack {

enum class ActivityLabel { driving, plane, train, walking, unrecognized };

inline const char* to_string(ActivityLabel a) {
    switch (a) {
        case ActivityLabel::driving: return "driving";
        case ActivityLabel::plane: return "plane";
        case ActivityLabel::train: return "train";
        case ActivityLabel::walking: return "walking";
        case ActivityLabel::unrecognized: return "unrecognized";
    }
    return "unrecognized";
}

ActivityLabel activity_from_string(const std::string& s);

} // namespace pintrack
