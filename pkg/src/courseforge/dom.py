"""Error-tolerant HTML parsing plus selector generation and resolution.

The parser never fails on model-generated HTML: unclosed tags are auto-closed,
unknown tags are retained, stray end tags are dropped. Recovery actions that
signal structurally broken markup are recorded on the tree as repairs;
HTML5-legal omitted end tags (</p>, </li>, </body>, ...) are not repairs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

VOID_ELEMENTS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}

# Elements whose end tag generates an implied close instead of a repair.
IMPLIED_END = {
    "p", "li", "dt", "dd", "rt", "rp", "optgroup", "option", "caption",
    "colgroup", "thead", "tbody", "tfoot", "tr", "td", "th",
}
EOF_OMITTABLE = IMPLIED_END | {"html", "head", "body"}

# Start tags that implicitly close an open element (key) when they appear.
_CLOSED_BY_START = {
    "p": {
        "p", "div", "ul", "ol", "dl", "table", "section", "article", "aside",
        "header", "footer", "nav", "main", "form", "fieldset", "blockquote",
        "pre", "hr", "h1", "h2", "h3", "h4", "h5", "h6", "address", "figure",
    },
    "li": {"li"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
    "tr": {"tr"},
    "td": {"td", "th", "tr"},
    "th": {"td", "th", "tr"},
    "thead": {"tbody", "tfoot"},
    "tbody": {"tbody", "tfoot"},
    "option": {"option", "optgroup"},
    "optgroup": {"optgroup"},
}

_CSS_IDENT = re.compile(r"^-?[A-Za-z_][A-Za-z0-9_-]*$")
_XPATH_BY_ID = re.compile(r'^//\*\[@id="([^"]*)"\]$')
_XPATH_SEGMENT = re.compile(r"^([A-Za-z][A-Za-z0-9-]*)\[(\d+)\]$")


class NodeNotInTree(Exception):
    pass


class UnsupportedXPathSyntax(Exception):
    pass


class Node:
    """DOM node: element (uppercase tag), text ("#text"), or root ("#document")."""

    __slots__ = ("tag", "attrs", "children", "parent", "text", "source_line")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None, text: str = ""):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list[Node] = []
        self.parent: Node | None = None
        self.text = text
        self.source_line = 0  # 1-based line of the start tag in the parsed source

    @property
    def is_element(self) -> bool:
        return not self.tag.startswith("#")

    def element_children(self) -> list["Node"]:
        return [c for c in self.children if c.is_element]

    def append(self, child: "Node") -> None:
        child.parent = self
        self.children.append(child)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.tag == "#text":
            return f"Text({self.text!r})"
        return f"Node(<{self.tag.lower()}> children={len(self.children)})"


@dataclass
class ElementCitation:
    index: int
    xpath: str
    css_selector: str
    snippet: str  # element serialization truncated to 500 characters
    bounding_box: tuple[float, float, float, float] | None = None


class DomTree:
    def __init__(self, root: Node, repairs: list[tuple[str, str]]):
        self.root = root
        self.repairs = repairs

    def elements(self):
        """All element nodes in document order."""
        stack = list(reversed(self.root.children))
        while stack:
            node = stack.pop()
            if node.is_element:
                yield node
                stack.extend(reversed(node.children))

    def find_by_id(self, value: str) -> list[Node]:
        return [n for n in self.elements() if n.attrs.get("id") == value]

    def contains(self, node: Node) -> bool:
        cur = node
        while cur.parent is not None:
            cur = cur.parent
        return cur is self.root


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Node("#document")
        self.stack = [self.root]
        self.repairs: list[tuple[str, str]] = []

    def _top_tag(self) -> str:
        node = self.stack[-1]
        return node.tag.lower() if node.is_element else ""

    def handle_starttag(self, tag, attrs):
        while len(self.stack) > 1 and tag in _CLOSED_BY_START.get(self._top_tag(), ()):
            self.stack.pop()
        node = Node(tag.upper(), self._attr_dict(attrs))
        node.source_line = self.getpos()[0]
        self.stack[-1].append(node)
        if tag not in VOID_ELEMENTS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        node = Node(tag.upper(), self._attr_dict(attrs))
        node.source_line = self.getpos()[0]
        self.stack[-1].append(node)

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            return
        for depth in range(len(self.stack) - 1, 0, -1):
            if self.stack[depth].tag.lower() == tag:
                for popped in self.stack[depth + 1:]:
                    if popped.tag.lower() not in IMPLIED_END:
                        self.repairs.append(
                            ("unclosed-tag", f"<{popped.tag.lower()}> closed by </{tag}>")
                        )
                del self.stack[depth:]
                return
        self.repairs.append(("stray-end-tag", f"</{tag}> matches no open element"))

    def handle_data(self, data):
        if data:
            self.stack[-1].append(Node("#text", text=data))

    def close(self):
        super().close()
        for node in self.stack[1:]:
            if node.tag.lower() not in EOF_OMITTABLE:
                self.repairs.append(("unclosed-tag", f"<{node.tag.lower()}> still open at end of input"))
        del self.stack[1:]

    @staticmethod
    def _attr_dict(attrs) -> dict[str, str]:
        out: dict[str, str] = {}
        for name, value in attrs:
            out.setdefault(name.lower(), value if value is not None else "")
        return out


def parse_html(text: str) -> DomTree:
    """Parse HTML text into a DomTree; total, recovery-based, never raises."""
    builder = _TreeBuilder()
    builder.feed(text or "")
    builder.close()
    return DomTree(builder.root, builder.repairs)


def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return value.replace("&", "&amp;").replace('"', "&quot;")


def serialize(node: Node) -> str:
    """Render a node as HTML, matching browser outerHTML conventions."""
    if node.tag == "#document":
        return "".join(serialize(c) for c in node.children)
    if node.tag == "#text":
        parent = node.parent
        if parent is not None and parent.tag in ("SCRIPT", "STYLE"):
            return node.text  # raw text content, never entity-escaped
        return _escape_text(node.text)
    tag = node.tag.lower()
    attrs = "".join(f' {name}="{_escape_attr(value)}"' for name, value in node.attrs.items())
    if tag in VOID_ELEMENTS:
        return f"<{tag}{attrs}>"
    inner = "".join(serialize(c) for c in node.children)
    return f"<{tag}{attrs}>{inner}</{tag}>"


def _require_element_in_tree(tree: DomTree, node: Node) -> None:
    if not isinstance(node, Node) or not node.is_element:
        raise NodeNotInTree("selectors target element nodes only")
    if not tree.contains(node):
        raise NodeNotInTree("node does not belong to this tree")


def compute_xpath(tree: DomTree, node: Node) -> str:
    """Id shortcut when available, else a positional /TAG[i]/... path."""
    _require_element_in_tree(tree, node)
    node_id = node.attrs.get("id")
    if node_id:
        return f'//*[@id="{node_id}"]'
    segments: list[str] = []
    cur = node
    while cur.parent is not None:
        siblings = [c for c in cur.parent.element_children() if c.tag == cur.tag]
        segments.append(f"{cur.tag}[{siblings.index(cur) + 1}]")
        cur = cur.parent
    return "/" + "/".join(reversed(segments))


def compute_css_selector(tree: DomTree, node: Node) -> str:
    """Deterministic selector anchored at the nearest id-bearing ancestor."""
    _require_element_in_tree(tree, node)
    node_id = node.attrs.get("id")
    if node_id:
        return f"#{node_id}"
    segments: list[str] = []
    cur = node
    while cur is not None and cur.is_element:
        cur_id = cur.attrs.get("id")
        if cur_id and cur is not node:
            segments.append(f"#{cur_id}")
            break
        tag = cur.tag.lower()
        classes = "".join(
            f".{c}" for c in cur.attrs.get("class", "").split() if _CSS_IDENT.match(c)
        )
        if cur.parent is not None:
            same_tag = [s for s in cur.parent.element_children() if s.tag == cur.tag]
            position = same_tag.index(cur) + 1
        else:
            position = 1
        segments.append(f"{tag}{classes}:nth-of-type({position})")
        cur = cur.parent
    return " > ".join(reversed(segments))


def resolve_xpath(tree: DomTree, xpath: str) -> Node | None:
    """Resolve the two emitted selector shapes; miss on none or multiple."""
    by_id = _XPATH_BY_ID.match(xpath)
    if by_id:
        matches = tree.find_by_id(by_id.group(1))
        return matches[0] if len(matches) == 1 else None
    if not xpath.startswith("/") or xpath.startswith("//"):
        raise UnsupportedXPathSyntax(f"unsupported xpath shape: {xpath!r}")
    cur = tree.root
    for part in xpath[1:].split("/"):
        seg = _XPATH_SEGMENT.match(part)
        if not seg:
            raise UnsupportedXPathSyntax(f"unsupported xpath segment: {part!r}")
        tag, index = seg.group(1).upper(), int(seg.group(2))
        same_tag = [c for c in cur.element_children() if c.tag == tag]
        if index < 1 or index > len(same_tag):
            return None
        cur = same_tag[index - 1]
    return cur


def resolve_css_selector(tree: DomTree, selector: str) -> Node | None:
    """Resolve selectors of the emitted grammar; lenient: None on no match."""
    parts = [p.strip() for p in selector.split(">")]
    if not parts or not all(parts):
        return None
    candidates: list[Node] = []
    first = parts[0]
    if first.startswith("#"):
        matches = tree.find_by_id(first[1:])
        if len(matches) != 1:
            return None
        candidates = [matches[0]]
    else:
        candidates = [n for n in tree.elements() if _segment_matches(n, first)]
    for part in parts[1:]:
        candidates = [
            c for node in candidates for c in node.element_children()
            if _segment_matches(c, part)
        ]
    return candidates[0] if len(candidates) == 1 else None


def _segment_matches(node: Node, segment: str) -> bool:
    if segment.startswith("#"):
        return node.attrs.get("id") == segment[1:]
    m = re.match(r"^([A-Za-z][A-Za-z0-9-]*)((?:\.[^.:]+)*)(?::nth-of-type\((\d+)\))?$", segment)
    if not m:
        return False
    tag, class_blob, position = m.group(1), m.group(2), m.group(3)
    if node.tag.lower() != tag.lower():
        return False
    wanted = {c for c in class_blob.split(".") if c}
    have = set(node.attrs.get("class", "").split())
    if not wanted.issubset(have):
        return False
    if position is not None:
        if node.parent is None:
            return int(position) == 1
        same_tag = [c for c in node.parent.element_children() if c.tag == node.tag]
        if same_tag.index(node) + 1 != int(position):
            return False
    return True


def snippet_search(tree: DomTree, snippet: str) -> Node | None:
    """Find the unique element whose truncated serialization equals snippet."""
    if not snippet:
        return None
    matches = [n for n in tree.elements() if serialize(n)[:500] == snippet]
    return matches[0] if len(matches) == 1 else None


def make_citation(tree: DomTree, node: Node, index: int) -> ElementCitation:
    _require_element_in_tree(tree, node)
    return ElementCitation(
        index=index,
        xpath=compute_xpath(tree, node),
        css_selector=compute_css_selector(tree, node),
        snippet=serialize(node)[:500],
    )
