#include "doctest.h"
#include "shopx/css/selector.hpp"

using namespace shopx;

namespace {

const char* kPage =
    "<div id=\"main\" class=\"product\">"
    "<table class=\"nutrition\"><tr class=\"row fat\"><th>Fett</th><td class=\"fat\">3,5 g</td></tr>"
    "<tr class=\"row salt\"><th>Salz</th><td class=\"salt\">0,1 g</td></tr></table>"
    "<ul><li>a</li><li lang=\"de-DE\">b</li><li>c</li></ul>"
    "<p class=\"ingredients text\">Zutaten: Zucker</p>"
    "</div>";

std::vector<std::string> texts(const std::string& selector, const html::Document& doc) {
    std::vector<std::string> out;
    for (const auto* n : css::Selector::parse(selector).select(doc.root())) out.push_back(html::text_content(*n));
    return out;
}

} // namespace

TEST_CASE("basic selectors match in document order") {
    auto doc = html::parse(kPage);
    CHECK(texts(".nutrition td.fat", doc) == std::vector<std::string>{"3,5 g"});
    CHECK(texts("td", doc) == std::vector<std::string>{"3,5 g", "0,1 g"});
    CHECK(texts("#main > p", doc) == std::vector<std::string>{"Zutaten: Zucker"});
    CHECK(texts("div > td", doc).empty());
    CHECK(texts("th + td", doc) == std::vector<std::string>{"3,5 g", "0,1 g"});
    CHECK(texts("li ~ li", doc) == std::vector<std::string>{"b", "c"});
    CHECK(texts("li:first-child, li:last-child", doc) == std::vector<std::string>{"a", "c"});
    CHECK(texts("li:nth-child(2)", doc) == std::vector<std::string>{"b"});
    CHECK(texts("li:nth-of-type(odd)", doc) == std::vector<std::string>{"a", "c"});
    CHECK(texts("li:not(:first-child)", doc) == std::vector<std::string>{"b", "c"});
    CHECK(texts("[lang|=de]", doc) == std::vector<std::string>{"b"});
    CHECK(texts("p[class~=text]", doc) == std::vector<std::string>{"Zutaten: Zucker"});
    CHECK(texts("[class^=ingr]", doc).size() == 1);
    CHECK(texts("[class$=xt]", doc).size() == 1);
    CHECK(texts("[class*=redient]", doc).size() == 1);
    CHECK(texts("tr:contains(\"Salz\") td", doc) == std::vector<std::string>{"0,1 g"});
    CHECK(texts("*", doc).size() == 13);
}

TEST_CASE("select honours the match limit") {
    auto doc = html::parse(kPage);
    CHECK(css::Selector::parse("*").select(doc.root(), 3).size() == 3);
}

TEST_CASE("invalid selectors are rejected") {
    for (const char* bad : {"td[", "", " ", "a >", ",a", "a,", ".", "#", "td:hover", ":nth-child(x)", "a $ b",
                            "[a~b]", "[a=\"x]", ":not(a"}) {
        CHECK_THROWS_AS_MESSAGE(css::Selector::parse(bad), css::InvalidSelector, bad);
    }
}
