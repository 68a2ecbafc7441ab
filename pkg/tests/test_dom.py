"""HTML tree building, selector generation and resolution."""

import random

import pytest

from courseforge.dom import (
    DomTree,
    Node,
    NodeNotInTree,
    UnsupportedXPathSyntax,
    compute_css_selector,
    compute_xpath,
    make_citation,
    parse_html,
    resolve_css_selector,
    resolve_xpath,
    serialize,
    snippet_search,
)


def same_structure(a: Node, b: Node) -> bool:
    if (a.tag, a.attrs, a.text) != (b.tag, b.attrs, b.text):
        return False
    if len(a.children) != len(b.children):
        return False
    return all(same_structure(x, y) for x, y in zip(a.children, b.children))


def first_element(tree: DomTree, tag: str) -> Node:
    for node in tree.elements():
        if node.tag == tag.upper():
            return node
    raise AssertionError(f"no <{tag}> in tree")


# ---------------------------------------------------------------- parsing


def test_parse_simple_fragment():
    tree = parse_html("<div><p>hi</p></div>")
    div = tree.root.children[0]
    assert div.tag == "DIV"
    p = div.children[0]
    assert p.tag == "P"
    assert p.children[0].tag == "#text" and p.children[0].text == "hi"


def test_parse_recovers_unclosed_paragraph():
    # mirrors what a browser builds for the same fragment
    closed = parse_html("<div><p>hi</p></div>")
    recovered = parse_html("<div><p>hi</div>")
    assert same_structure(closed.root, recovered.root)
    assert recovered.repairs == []  # </p> is legally omittable


def test_parse_empty_string():
    tree = parse_html("")
    assert tree.root.tag == "#document"
    assert tree.root.children == []


def test_parse_never_fails_on_garbage():
    tree = parse_html("<<<div <p hi> </span></b><custom-tag x=1>text")
    assert tree.root.tag == "#document"


def test_unknown_tags_retained():
    tree = parse_html("<my-widget data-x='1'>hello</my-widget>")
    widget = tree.root.children[0]
    assert widget.tag == "MY-WIDGET"
    assert widget.attrs == {"data-x": "1"}


def test_structural_repairs_recorded():
    assert parse_html("<div><span></div>").repairs != []
    assert parse_html("<section>").repairs != []
    assert parse_html("</div>").repairs != []
    assert parse_html("<html><body><p>fine").repairs == []


def test_sibling_paragraphs_autoclose():
    tree = parse_html("<body><p>one<p>two<p>three</body>")
    body = tree.root.children[0]
    assert [c.tag for c in body.element_children()] == ["P", "P", "P"]


def test_parser_idempotence():
    sources = [
        "<div><p>hi</p></div>",
        "<html><head><title>t</title></head><body><p>a &lt; b &amp; c</p></body></html>",
        "<ul><li>one<li>two</ul>",
        '<script>if (a < b) { x("&"); }</script>',
        '<div class="a b" data-v="q&quot;e">text</div>',
        "<div><br><img src='x.png'><input disabled></div>",
    ]
    for source in sources:
        once = parse_html(source)
        twice = parse_html(serialize(once.root))
        assert same_structure(once.root, twice.root), source


def test_script_content_kept_raw():
    source = "<script>for (let i = 0; i < 5; i++) draw(i);</script>"
    tree = parse_html(source)
    assert serialize(tree.root) == source


# ----------------------------------------------------------------- xpath


def test_xpath_id_shortcut():
    tree = parse_html('<html><body><h1 id="title">T</h1></body></html>')
    node = first_element(tree, "h1")
    assert compute_xpath(tree, node) == '//*[@id="title"]'


def test_xpath_of_root_element():
    tree = parse_html("<html><body></body></html>")
    root = tree.root.children[0]
    assert compute_xpath(tree, root) == "/HTML[1]"


def test_xpath_positional_index():
    tree = parse_html("<html><body><p>a</p><p>b</p><p>c</p></body></html>")
    second = tree.root.children[0].element_children()[0].element_children()[1]
    path = compute_xpath(tree, second)
    assert path.endswith("/P[2]")
    assert path == "/HTML[1]/BODY[1]/P[2]"


def test_xpath_counts_same_tag_elements_only():
    tree = parse_html("<body>text<span>s</span> more <p>a</p><p>b</p></body>")
    body = tree.root.children[0]
    second_p = body.element_children()[2]
    assert compute_xpath(tree, second_p).endswith("/P[2]")


def test_resolve_xpath_misses():
    tree = parse_html("<html><body><p>a</p><p>b</p><p>c</p></body></html>")
    assert resolve_xpath(tree, '//*[@id="nope"]') is None
    assert resolve_xpath(tree, "/HTML[1]/BODY[1]/P[9]") is None


def test_resolve_xpath_unsupported_syntax():
    tree = parse_html("<div></div>")
    for bad in ("//div[1]", "/DIV[1]/following-sibling::p", '//*[@class="x"]', "DIV[1]"):
        with pytest.raises(UnsupportedXPathSyntax):
            resolve_xpath(tree, bad)


def test_duplicate_id_is_a_miss_never_a_wrong_node():
    tree = parse_html('<div id="dup">a</div><div id="dup">b</div>')
    first = tree.root.children[0]
    assert compute_xpath(tree, first) == '//*[@id="dup"]'
    assert resolve_xpath(tree, '//*[@id="dup"]') is None


def test_node_not_in_tree():
    tree = parse_html("<div></div>")
    other = parse_html("<p></p>")
    with pytest.raises(NodeNotInTree):
        compute_xpath(tree, other.root.children[0])


def test_text_node_rejected():
    tree = parse_html("<p>hello</p>")
    text = tree.root.children[0].children[0]
    with pytest.raises(NodeNotInTree):
        compute_css_selector(tree, text)


# ------------------------------------------------------------- css


def test_css_id_shortcut():
    tree = parse_html('<section id="hero">x</section>')
    assert compute_css_selector(tree, tree.root.children[0]) == "#hero"


def test_css_class_chain():
    tree = parse_html(
        '<html><body><div class="panel left">a</div><div class="panel right">b</div></body></html>'
    )
    left = first_element(tree, "div")
    selector = compute_css_selector(tree, left)
    assert selector.endswith("div.panel.left:nth-of-type(1)")
    assert selector.startswith("html:nth-of-type(1) > body:nth-of-type(1)")
    assert resolve_css_selector(tree, selector) is left


def test_css_anchors_at_id_ancestor():
    tree = parse_html('<div id="app"><ul><li>a</li><li>b</li></ul></div>')
    second_li = first_element(tree, "ul").element_children()[1]
    selector = compute_css_selector(tree, second_li)
    assert selector == "#app > ul:nth-of-type(1) > li:nth-of-type(2)"
    assert resolve_css_selector(tree, selector) is second_li


# ------------------------------------------------------------- citations


def test_citation_snippet_truncated_to_500():
    body = "<li>" + "x" * 80 + "</li>"
    html = f'<section id="big">{body * 30}</section>'
    tree = parse_html(html)
    citation = make_citation(tree, tree.root.children[0], 1)
    assert len(citation.snippet) == 500
    assert len(serialize(tree.root.children[0])) > 2000


def test_citation_short_snippet_untruncated():
    tree = parse_html("<b>x</b>")
    citation = make_citation(tree, tree.root.children[0], 1)
    assert citation.snippet == "<b>x</b>"


def test_citation_index_is_presentational():
    tree = parse_html("<p>x</p>")
    node = tree.root.children[0]
    a = make_citation(tree, node, 1)
    b = make_citation(tree, node, 2)
    assert (a.xpath, a.css_selector, a.snippet) == (b.xpath, b.css_selector, b.snippet)
    assert (a.index, b.index) == (1, 2)


def test_snippet_search_finds_unique_element():
    tree = parse_html("<div><p>alpha</p><p>beta</p></div>")
    beta = tree.root.children[0].element_children()[1]
    assert snippet_search(tree, serialize(beta)[:500]) is beta
    assert snippet_search(tree, "<p>nope</p>") is None
    # identical elements are ambiguous
    twin = parse_html("<div><p>x</p><p>x</p></div>")
    assert snippet_search(twin, "<p>x</p>") is None


# ------------------------------------------------- randomized round trips


TAGS = ["div", "p", "span", "section", "ul", "li", "h2", "em", "article"]


def random_html(rng: random.Random, n_elements: int, id_coverage: float = 0.2) -> str:
    counter = [0]

    def element(depth: int) -> str:
        if counter[0] >= n_elements:
            return ""
        counter[0] += 1
        tag = rng.choice(TAGS)
        attrs = ""
        if rng.random() < id_coverage:
            attrs += f' id="uid-{counter[0]}"'
        if rng.random() < 0.3:
            attrs += f' class="c{rng.randint(0, 4)} k{rng.randint(0, 2)}"'
        inner = []
        if rng.random() < 0.6:
            inner.append(f"text {counter[0]}")
        if depth < 5:
            for _ in range(rng.randint(0, 3)):
                inner.append(element(depth + 1))
        return f"<{tag}{attrs}>{''.join(inner)}</{tag}>"

    parts = []
    while counter[0] < n_elements:
        parts.append(element(0))
    return f"<html><body>{''.join(parts)}</body></html>"


def test_xpath_round_trip_exhaustive_on_random_documents():
    rng = random.Random(7)
    for _ in range(20):
        tree = parse_html(random_html(rng, rng.randint(10, 100)))
        for node in tree.elements():
            path = compute_xpath(tree, node)
            assert resolve_xpath(tree, path) is node, path


def test_css_round_trip_on_random_documents():
    rng = random.Random(11)
    for _ in range(10):
        tree = parse_html(random_html(rng, rng.randint(10, 60)))
        for node in tree.elements():
            selector = compute_css_selector(tree, node)
            assert resolve_css_selector(tree, selector) is node, selector


def test_parser_idempotence_on_random_documents():
    rng = random.Random(13)
    for _ in range(10):
        source = random_html(rng, rng.randint(5, 60))
        once = parse_html(source)
        twice = parse_html(serialize(once.root))
        assert same_structure(once.root, twice.root)
