/** Minimal host page wiring: preview, citation panel, instruction box. */

import { CourseforgeClient } from "./api.js";
import { EditorController } from "./app.js";
import { PreviewPane } from "./preview.js";
import type { Citation } from "./types.js";

export function bootstrapEditor(root: HTMLElement, baseUrl: string): EditorController {
  const doc = root.ownerDocument;
  root.innerHTML = `
    <div style="display: flex; gap: 12px; height: 100%; font-family: system-ui, sans-serif;">
      <div data-role="preview" style="flex: 2; min-height: 480px; border: 1px solid #ccc;"></div>
      <div style="flex: 1; display: flex; flex-direction: column; gap: 8px;">
        <label>Courseware id <input data-role="courseware-id" style="width: 100%"></label>
        <button data-role="load">Load</button>
        <ol data-role="citations" style="flex: 1; overflow: auto; font: 12px/1.4 monospace;"></ol>
        <textarea data-role="instruction" rows="3" placeholder="Describe the change..."></textarea>
        <button data-role="submit" disabled>Apply edit</button>
        <div data-role="status" aria-live="polite"></div>
      </div>
    </div>`;

  const previewHost = root.querySelector<HTMLElement>('[data-role="preview"]')!;
  const citationList = root.querySelector<HTMLOListElement>('[data-role="citations"]')!;
  const instruction = root.querySelector<HTMLTextAreaElement>('[data-role="instruction"]')!;
  const submit = root.querySelector<HTMLButtonElement>('[data-role="submit"]')!;
  const status = root.querySelector<HTMLElement>('[data-role="status"]')!;
  const idInput = root.querySelector<HTMLInputElement>('[data-role="courseware-id"]')!;
  const loadButton = root.querySelector<HTMLButtonElement>('[data-role="load"]')!;

  const client = new CourseforgeClient(baseUrl);
  const preview = new PreviewPane(previewHost);
  const controller = new EditorController(client, preview);
  let selected: Citation | null = null;

  function renderCitations(): void {
    citationList.innerHTML = "";
    for (const citation of controller.citations) {
      const item = doc.createElement("li");
      item.textContent = `[${citation.index}] ${citation.picked.snippet.slice(0, 80)}`;
      if (citation === selected) item.style.fontWeight = "bold";
      item.addEventListener("click", () => {
        selected = citation;
        renderCitations();
      });
      citationList.appendChild(item);
    }
    submit.disabled = !controller.canSubmit || selected === null;
  }

  preview.onPick((picked) => {
    selected = controller.handlePick(picked);
    renderCitations();
  });

  loadButton.addEventListener("click", () => {
    controller
      .load(idInput.value.trim())
      .then(() => {
        selected = null;
        renderCitations();
        status.textContent = "loaded";
      })
      .catch((error) => {
        status.textContent = String(error);
      });
  });

  submit.addEventListener("click", () => {
    if (!selected || !controller.canSubmit) return;
    submit.disabled = true;
    status.textContent = "editing...";
    controller
      .submitInstruction(selected.picked, instruction.value)
      .then((outcome) => {
        if (outcome.status === "error") {
          status.textContent = `error: ${outcome.errorMessage ?? outcome.errorCode}`;
        } else {
          status.textContent = `${outcome.status} v${outcome.version} in ${outcome.latencyMs} ms`;
          selected = null;
        }
        renderCitations();
      })
      .catch((error) => {
        status.textContent = String(error);
        renderCitations();
      });
  });

  return controller;
}
