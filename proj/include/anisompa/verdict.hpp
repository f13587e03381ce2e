#pragma once

#include <string_view>

namespace anisompa {

enum class Verdict { Pass, Fail, Inconclusive };

constexpr std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        default: return "INCONCLUSIVE";
    }
}

} // namespace anisompa
