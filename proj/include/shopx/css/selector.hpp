#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "shopx/common/error.hpp"
#include "shopx/html/dom.hpp"

namespace shopx::css {

class InvalidSelector : public Error {
public:
    using Error::Error;
};

namespace detail {
struct SelectorList;
}

/// A parsed CSS selector list.
///
/// Supported: type and universal selectors, `#id`, `.class`, attribute
/// selectors (`[a]`, `=`, `~=`, `|=`, `^=`, `$=`, `*=`), the combinators
/// descendant, `>`, `+` and `~`, the pseudo-classes `:first-child`,
/// `:last-child`, `:only-child`, `:nth-child(an+b)`, `:nth-of-type(an+b)`,
/// `:not(compound)` and the non-standard `:contains("text")`, which tests the
/// whitespace-collapsed text content.
class Selector {
public:
    /// Throws InvalidSelector on syntax errors.
    static Selector parse(std::string_view source);

    bool matches(const html::Node& element) const;

    /// Matching elements under `root` in document order, at most `limit`.
    std::vector<const html::Node*> select(const html::Node& root, std::size_t limit = 10'000) const;

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    std::shared_ptr<const detail::SelectorList> list_;
};

} // namespace shopx::css
