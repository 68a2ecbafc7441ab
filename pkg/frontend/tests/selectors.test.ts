// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { getCssSelector, getSnippet, getXPath, pickElement } from "../src/selectors.js";

function parse(html: string): Document {
  return new DOMParser().parseFromString(html, "text/html");
}

describe("getXPath", () => {
  it("uses the id shortcut", () => {
    const doc = parse('<html><body><h1 id="title">T</h1></body></html>');
    expect(getXPath(doc.getElementById("title")!)).toBe('//*[@id="title"]');
  });

  it("returns /HTML[1] for the root element", () => {
    const doc = parse("<html><body></body></html>");
    expect(getXPath(doc.documentElement)).toBe("/HTML[1]");
  });

  it("builds positional paths counting same-tag siblings only", () => {
    const doc = parse(
      "<html><body>text<span>s</span><p>a</p><p>b</p><p>c</p></body></html>"
    );
    const second = doc.querySelectorAll("p")[1];
    expect(getXPath(second)).toBe("/HTML[1]/BODY[1]/P[2]");
  });

  it("ignores ancestor ids (shortcut applies to the node itself only)", () => {
    const doc = parse('<html><body><div id="wrap"><p>x</p></div></body></html>');
    expect(getXPath(doc.querySelector("p")!)).toBe("/HTML[1]/BODY[1]/DIV[1]/P[1]");
  });
});

describe("getCssSelector", () => {
  it("uses #id for id-bearing elements", () => {
    const doc = parse('<html><body><section id="hero">x</section></body></html>');
    expect(getCssSelector(doc.getElementById("hero")!)).toBe("#hero");
  });

  it("emits tag.class:nth-of-type chains", () => {
    const doc = parse(
      '<html><body><div class="panel left">a</div><div class="panel right">b</div></body></html>'
    );
    const selector = getCssSelector(doc.querySelector("div")!);
    expect(selector).toBe(
      "html:nth-of-type(1) > body:nth-of-type(1) > div.panel.left:nth-of-type(1)"
    );
    expect(doc.querySelector(selector)).toBe(doc.querySelector("div"));
  });

  it("anchors at the nearest id-bearing ancestor", () => {
    const doc = parse(
      '<html><body><div id="app"><ul><li>a</li><li>b</li></ul></div></body></html>'
    );
    const secondLi = doc.querySelectorAll("li")[1];
    expect(getCssSelector(secondLi)).toBe("#app > ul:nth-of-type(1) > li:nth-of-type(2)");
  });
});

describe("snippets and picked elements", () => {
  it("truncates snippets to 500 characters", () => {
    const doc = parse(`<html><body><section>${"<b>x</b>".repeat(200)}</section></body></html>`);
    const section = doc.querySelector("section")!;
    expect(section.outerHTML.length).toBeGreaterThan(500);
    expect(getSnippet(section)).toHaveLength(500);
    expect(getSnippet(section)).toBe(section.outerHTML.substring(0, 500));
  });

  it("keeps short snippets untruncated", () => {
    const doc = parse("<html><body><b>x</b></body></html>");
    expect(getSnippet(doc.querySelector("b")!)).toBe("<b>x</b>");
  });

  it("produces the exact wire schema", () => {
    const doc = parse('<html><body><p id="p1">hey</p></body></html>');
    const picked = pickElement(doc.getElementById("p1")!);
    expect(Object.keys(picked).sort()).toEqual([
      "bounding_box",
      "css_selector",
      "snippet",
      "xpath",
    ]);
    expect(picked.xpath).toBe('//*[@id="p1"]');
    expect(picked.css_selector).toBe("#p1");
    expect(picked.snippet).toBe('<p id="p1">hey</p>');
  });
});
