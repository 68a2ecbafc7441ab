"""Shared fixtures: a stage-valid interactive page and knowledge records."""

from courseforge.knowledge import (
    AdjustableParameter,
    GradeLevel,
    ProceduralConcept,
    StructuredKnowledge,
    SubjectArea,
    Theme,
)

# Passes every content-stage check: two marked sibling panels, a range
# input, and a script block.
CONTENT_PAGE = """<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>Inertia simulation</title>
</head>
<body>
<div class="layout">
<section id="process-panel">
<h2>Procedure</h2>
<ol>
<li>Give the skater a push</li>
<li>Watch the glide</li>
</ol>
</section>
<section id="simulation-panel">
<label>Mass <input type="range" id="mass" min="1" max="10" value="5"></label>
<button id="reset">Reset</button>
<canvas id="view" width="400" height="200"></canvas>
</section>
</div>
<script>
var mass = document.getElementById("mass");
mass.addEventListener("input", render);
function render() { /* redraw */ }
</script>
</body>
</html>"""

# Well-formed but fails the content checks (no script, no controls, no panels).
PLAIN_PAGE = "<html><head><title>x</title></head><body><p>static text</p></body></html>"

# Structural repairs force well_formed == False.
MALFORMED_PAGE = "<html><body><div><span>broken</div></body></html>"


def polished_page(theme: Theme) -> str:
    style = f"<style>h1, h2 {{ color: {theme.primary_color}; }}</style>"
    return CONTENT_PAGE.replace("</head>", style + "\n</head>")


def make_knowledge(subject=SubjectArea.PHYSICS) -> StructuredKnowledge:
    return StructuredKnowledge(
        main_topics=["Motion", "Forces", "Energy"],
        key_concepts=["inertia", "net force"],
        learning_objectives=["predict motion without net force"],
        prerequisite_knowledge=["velocity"],
        procedural_concepts=[
            ProceduralConcept(
                name="Skater run",
                steps=["give a push", "watch the glide", "apply friction"],
                parameters=[
                    AdjustableParameter("mass", "skater mass"),
                    AdjustableParameter("friction", "surface friction"),
                ],
            )
        ],
        subject_area=subject,
        grade_level=GradeLevel.MIDDLE,
    )
