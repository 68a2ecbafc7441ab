/** Deterministic fixture corpus: varied interactive pages that pass both
 * generation validators (panels, control, script, theme color). Boundary
 * tags are kept adjacent so the host and server DOMs agree byte-for-byte. */

export const THEME_PRIMARY = "#1E5AA8"; // Physics theme

export function knowledgePayload(): Record<string, unknown> {
  return {
    main_topics: ["Motion", "Forces", "Energy"],
    key_concepts: ["inertia"],
    learning_objectives: ["predict motion"],
    prerequisite_knowledge: [],
    procedural_concepts: [],
    subject_area: "Physics",
    grade_level: "High",
  };
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

// containers may hold blocks; leaves hold text only (keeps nesting HTML5-valid
// so both parsers build identical trees without recovery)
const CONTAINER_TAGS = ["div", "section", "article", "aside"];
const LEAF_TAGS = ["p", "span", "em", "strong", "h3"];

export function fixtureDoc(seed: number): string {
  const rand = mulberry32(seed + 1);
  let uid = 0;
  const varied: string[] = [];
  const blocks = 2 + Math.floor(rand() * 3);
  for (let b = 0; b < blocks; b++) {
    const outer = CONTAINER_TAGS[Math.floor(rand() * CONTAINER_TAGS.length)];
    const outerId = rand() < 0.3 ? ` id="el-${seed}-${uid++}"` : "";
    const outerClass = rand() < 0.4 ? ` class="k${Math.floor(rand() * 3)}"` : "";
    varied.push(`<${outer}${outerId}${outerClass}>`);
    const items = 1 + Math.floor(rand() * 3);
    for (let i = 0; i < items; i++) {
      const inner = LEAF_TAGS[Math.floor(rand() * LEAF_TAGS.length)];
      const innerId = rand() < 0.2 ? ` id="el-${seed}-${uid++}"` : "";
      varied.push(`<${inner}${innerId}>item ${seed}-${b}-${i}</${inner}>`);
    }
    if (rand() < 0.5) {
      varied.push("<ul>");
      const lis = 2 + Math.floor(rand() * 2);
      for (let i = 0; i < lis; i++) varied.push(`<li>point ${b}-${i}</li>`);
      varied.push("</ul>");
    }
    varied.push(`</${outer}>`);
  }
  return [
    "<!DOCTYPE html>",
    // html/head and head/body boundaries kept adjacent (no whitespace nodes)
    '<html><head><meta charset="utf-8">',
    `<title>Fixture ${seed}</title>`,
    `<style>h1, h2 { color: ${THEME_PRIMARY}; } .wrap { display: flex; }</style>`,
    '</head><body><div class="wrap">',
    '<section id="process-panel">',
    `<h2>Steps for run ${seed}</h2>`,
    "<ol>",
    "<li>Prepare the setup</li>",
    "<li>Run the sweep</li>",
    "</ol>",
    ...varied,
    "</section>",
    '<section id="simulation-panel">',
    `<label>Level <input type="range" id="level-${seed}" min="0" max="9" value="${seed % 10}"></label>`,
    '<button id="reset-btn">Reset</button>',
    '<canvas id="stage" width="320" height="160"></canvas>',
    "</section>",
    "</div>",
    "<script>",
    'document.getElementById("reset-btn").addEventListener("click", function () { draw(0); });',
    "function draw(level) { /* paint */ }",
    "</script>",
    "</body></html>",
  ].join("\n");
}

/** One-line replacement diff for a fixture, built from known line positions. */
export function singleLineDiff(docText: string, oldLine: string, newLine: string): string {
  const lines = docText.split("\n");
  const at = lines.indexOf(oldLine);
  if (at === -1) throw new Error(`line not found in fixture: ${oldLine}`);
  const before = lines.slice(Math.max(0, at - 3), at);
  const after = lines.slice(at + 1, at + 4);
  const sourceStart = at + 1 - before.length;
  const count = before.length + 1 + after.length;
  const body = [
    ...before.map((l) => " " + l),
    "-" + oldLine,
    "+" + newLine,
    ...after.map((l) => " " + l),
  ];
  return [
    "--- original.html",
    "+++ modified.html",
    `@@ -${sourceStart},${count} +${sourceStart},${count} @@`,
    ...body,
    "",
  ].join("\n");
}
