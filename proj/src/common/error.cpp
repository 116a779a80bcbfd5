#include "shopx/common/error.hpp"

namespace shopx {

std::string describe(const std::vector<FieldError>& errors) {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) out += "; ";
        out += e.path.empty() ? std::string("<root>") : e.path;
        out += ": ";
        out += e.reason;
    }
    return out;
}

} // namespace shopx
