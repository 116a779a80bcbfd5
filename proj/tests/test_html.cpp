#include <fstream>
#include <sstream>

#include "doctest.h"
#include "shopx/common/text.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/html/dom.hpp"

using namespace shopx;
using namespace shopx::html;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string& name) { return read_file(std::string(SHOPX_FIXTURE_DIR) + "/" + name); }

int count_elements(const Node& root, std::string_view tag) {
    int n = 0;
    for_each_node(root, [&](const Node& node) {
        if (node.is_element() && node.name() == tag) ++n;
    });
    return n;
}

} // namespace

TEST_CASE("parse recovers from unclosed and stray tags") {
    Document doc = parse("<div><p>a<p>b</span><ul><li>x<li>y</ul></div><b>");
    REQUIRE(doc.root().children().size() == 2);
    const Node& div = *doc.root().children()[0];
    CHECK(div.name() == "div");
    CHECK(serialize(div) == "<div><p>a</p><p>b</p><ul><li>x</li><li>y</li></ul></div>");
}

TEST_CASE("parse decodes entities in text and attributes") {
    Document doc = parse("<p title=\"a&amp;b\">N&auml;hrwerte &#228; &#xE4; &bogus; 3 &lt; 4</p>");
    const Node& p = *doc.root().children()[0];
    CHECK(*p.attribute("title") == "a&b");
    CHECK(text_content(p) == "Nährwerte ä ä &bogus; 3 < 4");
    CHECK(serialize(p) == "<p title=\"a&amp;b\">Nährwerte ä ä &amp;bogus; 3 &lt; 4</p>");
}

TEST_CASE("script content is raw text") {
    Document doc = parse("<script>if (a < b && c) { x = '</div>'; }</script><p>t</p>");
    REQUIRE(doc.root().children().size() == 2);
    CHECK(text_content(*doc.root().children()[0]) == "if (a < b && c) { x = '</div>'; }");
}

TEST_CASE("table cells and rows close implicitly") {
    Document doc = parse("<table><tr><td>a<td>b<tr><td>c</table>");
    CHECK(serialize(doc.root()) == "<table><tr><td>a</td><td>b</td></tr><tr><td>c</td></tr></table>");
}

TEST_CASE("compress_html removes banned elements, attributes and comments") {
    RawDocument raw{"p1", "",
                    "<html><head><script>x</script></head><body><p class=\"a\" style=\"c\">T</p><!--c--></body></html>"};
    CompressedDocument out = compress_html(raw);
    CHECK(out.variant == Variant::HtmlCompressed);
    CHECK(out.content == "<html><body><p class=\"a\">T</p></body></html>");
    CHECK(out.content.find("script") == std::string::npos);
    CHECK(out.content.find("<!--") == std::string::npos);
    CHECK(out.token_count == count_tokens(out.content));
}

TEST_CASE("compress_html keeps an empty body") {
    CompressedDocument out = compress_html({"p2", "", "<html><body></body></html>"});
    CHECK(out.content == "<html><body></body></html>");
    CHECK(out.token_count >= 0);
    CompressedDocument text = extract_text(out);
    CHECK(text.content.empty());
    CHECK(text.token_count == 0);
}

TEST_CASE("compress_html removes option even with class and id") {
    CompressedDocument out =
        compress_html({"p3", "", "<select id=\"s\"><option class=\"o\" id=\"x\">1</option></select>"});
    CHECK(out.content == "<select id=\"s\"></select>");
}

TEST_CASE("compress_html rejects documents without content") {
    CHECK_THROWS_AS(compress_html({"e1", "", "   "}), UnparsableDocument);
    CHECK_THROWS_AS(compress_html({"e2", "", "<!-- nothing -->"}), UnparsableDocument);
}

TEST_CASE("extract_text separates block elements with newlines") {
    CompressedDocument in{"t1", Variant::HtmlCompressed, "<div><p>Zutaten:</p><p>Zucker</p></div>", 0};
    CHECK(extract_text(in).content == "Zutaten:\nZucker");

    CompressedDocument inline_run{"t2", Variant::HtmlCompressed,
                                  "<table><tr><th>Fett</th><td>3,5 <span>g</span></td></tr><tr><th>Salz</th><td>0,1 g</td></tr></table>", 0};
    CHECK(extract_text(inline_run).content == "Fett 3,5 g\nSalz 0,1 g");
}

TEST_CASE("extract_text rejects TEXT input") {
    CompressedDocument in{"t3", Variant::Text, "plain", 2};
    CHECK_THROWS_AS(extract_text(in), WrongVariant);
}

TEST_CASE("count_tokens uses ceil(bytes / 4)") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("abcd") == 1);
    CHECK(count_tokens("abcdefgh") == 2);
    // Brute-force the ceiling against length arithmetic for short strings.
    for (std::size_t n = 0; n < 64; ++n) {
        std::string s(n, 'x');
        std::int64_t expected = 0;
        for (std::size_t used = 0; used < n; used += 4) ++expected;
        CHECK(count_tokens(s) == expected);
    }
}

TEST_CASE("count_tokens is monotone under concatenation") {
    const std::vector<std::string> samples = {"", "a", "abc", "abcde", "Nährwerte", std::string(17, 'z')};
    for (const auto& a : samples) {
        for (const auto& b : samples) {
            auto c = count_tokens(a + b);
            CHECK(c >= count_tokens(a));
            CHECK(c >= count_tokens(b));
        }
    }
}

TEST_CASE("golden fixture compresses byte-exactly") {
    RawDocument raw{"globus_like_01", "https://shop.example/p/1", fixture("globus_like_01.html")};
    CompressedDocument compressed = compress_html(raw);
    CHECK(compressed.content == fixture("globus_like_01.compressed.html"));
    CompressedDocument text = extract_text(compressed);
    CHECK(text.content == fixture("globus_like_01.txt"));
}

TEST_CASE("golden fixture satisfies compression invariants") {
    RawDocument raw{"globus_like_01", "", fixture("globus_like_01.html")};
    CompressedDocument compressed = compress_html(raw);
    CompressedDocument text = extract_text(compressed);

    Document reparsed = parse(compressed.content);
    for (auto tag : kBannedElements) CHECK_MESSAGE(count_elements(reparsed.root(), tag) == 0, tag);
    for_each_node(reparsed.root(), [](const Node& n) {
        for (const auto& a : n.attributes()) CHECK((a.name == "class" || a.name == "id"));
    });

    CHECK(compressed.token_count <= count_tokens(raw.html));
    CHECK(text.token_count <= compressed.token_count);
    CHECK(text.content.find('<') == std::string::npos);

    // Idempotence on the serialized output.
    CHECK(compress_html({"again", "", compressed.content}).content == compressed.content);

    // Every visible text node shows up in order.
    std::size_t cursor = 0;
    for_each_node(reparsed.root(), [&](const Node& n) {
        if (!n.is_text()) return;
        std::string piece = text::collapse_whitespace(n.data());
        if (piece.empty()) return;
        auto found = text.content.find(piece, cursor);
        CHECK_MESSAGE(found != std::string::npos, piece);
        if (found != std::string::npos) cursor = found + piece.size();
    });
}
