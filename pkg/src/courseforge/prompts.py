"""Prompt templates for analysis, generation, and incremental editing."""

ANALYSIS_PROMPT = """
Analyze the provided educational document and extract the following
information in JSON format:

1. Main Topics: List 3-5 broad subject areas covered
2. Key Concepts: Specific terminology and principles students must master
3. Learning Objectives: Measurable outcomes students should achieve
4. Prerequisite Knowledge: Foundational concepts required beforehand
5. Procedural Concepts: Step-by-step processes suitable for simulation
   - Name of the procedure
   - List of steps
   - Adjustable parameters
6. Subject Area: One of [Physics, Chemistry, Biology, Math, Geography, Other]
7. Grade Level: One of [Primary, Middle, High, Undergraduate, Graduate]

Focus on identifying content that would benefit from interactive
visualization. Be precise and comprehensive.

Response format: Valid JSON only, no markdown formatting.
"""

STAGE1_PROMPT = """
Generate an interactive HTML/JavaScript simulation based on the
following educational content:

Subject: {subject_area}
Key Concepts: {key_concepts}
Procedural Concepts: {procedural_concepts}

Requirements:
1. Left panel: Step-by-step process display with current step highlighting
2. Right panel: Interactive controls for adjusting parameters
3. Real-time coupling between process and simulation panels
4. Scientific accuracy is paramount---verify all formulas and relationships
5. Include explanatory tooltips for technical terms
6. Use vanilla JavaScript (no external dependencies)
7. Responsive layout for tablet devices (min-width: 768px)

Generate complete, valid HTML with embedded CSS and JavaScript.
"""

STAGE2_PROMPT = """
Apply visual polish to the following HTML simulation:

Current HTML: {stage1_html}
Theme: {theme_config}

Enhancements to apply:
1. Apply theme colors consistently (primary: {primary}, accent: {accent})
2. Improve typography hierarchy
3. Add smooth animations for state transitions
4. Ensure consistent spacing and alignment
5. Validate all HTML structure
6. Maintain all interactive functionality

Return complete polished HTML.
"""

# Used when two-stage generation is unavailable: the content requirements and
# the visual requirements are issued as one combined request.
SINGLE_PASS_PROMPT = """
Generate an interactive HTML/JavaScript simulation based on the
following educational content:

Subject: {subject_area}
Key Concepts: {key_concepts}
Procedural Concepts: {procedural_concepts}

Requirements:
1. Left panel: Step-by-step process display with current step highlighting
2. Right panel: Interactive controls for adjusting parameters
3. Real-time coupling between process and simulation panels
4. Scientific accuracy is paramount---verify all formulas and relationships
5. Use vanilla JavaScript (no external dependencies)
6. Apply theme colors consistently (primary: {primary}, accent: {accent})
7. Improve typography hierarchy and consistent spacing

Generate complete, valid HTML with embedded CSS and JavaScript.
"""

VALIDATION_RETRY_SUFFIX = """

The previous attempt failed validation with these errors:
{errors}

Regenerate the complete HTML, fixing every listed problem.
"""

EDIT_PROMPT = """
You are editing an interactive HTML document. Apply the requested change
and output ONLY a unified diff against the current document. Rules:
- Output a single unified diff and nothing else: no prose, no code fences.
- Start with `--- original.html` and `+++ modified.html` headers.
- Every hunk must carry at least 3 unchanged context lines on each side.
- Quote context lines exactly as they appear in the document.

Selected element (citation {citation_index}):
xpath: {xpath}
css_selector: {css_selector}
snippet:
{snippet}

Instruction:
{instruction}

Current document:
{context_html}
"""

EDIT_RETRY_CONTEXT = """

The previous attempt failed: {failure_reason}

For reference, lines {window_start}-{window_end} of the current document
(the region around the selected element) are:
{window}

Regenerate the unified diff with wider, exactly-quoted context.
"""

REGENERATE_PROMPT = """
Rewrite the following HTML document so that it satisfies the instruction.
Output the complete modified HTML document and nothing else.

Selected element:
{snippet}

Instruction:
{instruction}

Current document:
{context_html}
"""
