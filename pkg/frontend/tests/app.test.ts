import { describe, expect, it } from "vitest";

import { EditorController, type PreviewLike } from "../src/app.js";
import type { CourseforgeClient } from "../src/api.js";
import type { CoursewareInfo, EditEvent, PickedElement } from "../src/types.js";

const PICKED: PickedElement = {
  xpath: '//*[@id="x"]',
  css_selector: "#x",
  snippet: '<p id="x">x</p>',
  bounding_box: null,
};

function coursewareAt(version: number, html: string): CoursewareInfo {
  return {
    id: "cw1",
    knowledge: {},
    theme: { primary_color: "#1E5AA8", accent_color: "#789CCB", subject_area: "Physics" },
    versions: Array.from({ length: version }, (_, i) => ({
      version: i + 1,
      created_at: 0,
      origin: i === 0 ? "Generated" : "Edited",
      level: null,
      html: i + 1 === version ? html : `<old v${i + 1}>`,
    })),
    current_version: version,
  };
}

class RecordingPreview implements PreviewLike {
  currentHtml: string | null = null;
  renders: string[] = [];
  render(html: string): void {
    this.currentHtml = html;
    this.renders.push(html);
  }
}

interface FakeOptions {
  events: EditEvent[];
  afterEdit?: CoursewareInfo;
  gate?: Promise<void>;
}

function fakeClient(initial: CoursewareInfo, options: FakeOptions): CourseforgeClient {
  let state = initial;
  return {
    async getCourseware() {
      return state;
    },
    async *submitEdit() {
      if (options.gate) await options.gate;
      for (const event of options.events) {
        if (
          (event.type === "applied" || event.type === "regenerated") &&
          options.afterEdit
        ) {
          state = options.afterEdit;
        }
        yield event;
      }
    },
  } as unknown as CourseforgeClient;
}

describe("EditorController", () => {
  it("swaps the preview only after a server-confirmed version", async () => {
    const v1 = coursewareAt(1, "<html><body>v1</body></html>");
    const v2 = coursewareAt(2, "<html><body>v2</body></html>");
    const client = fakeClient(v1, {
      events: [
        { type: "token", data: { text: "--- original.html" } },
        { type: "diff", data: { diff: "...", attempt: 1 } },
        { type: "applied", data: { version: 2, attempts: 1 } },
      ],
      afterEdit: v2,
    });
    const preview = new RecordingPreview();
    const controller = new EditorController(client, preview);
    await controller.load("cw1");
    expect(preview.currentHtml).toBe("<html><body>v1</body></html>");

    const outcome = await controller.submitInstruction(PICKED, "change it");
    expect(outcome.status).toBe("applied");
    expect(outcome.version).toBe(2);
    expect(preview.currentHtml).toBe("<html><body>v2</body></html>");
    expect(controller.lastLatencyMs).not.toBeNull();
  });

  it("keeps the old preview on error terminals", async () => {
    const v1 = coursewareAt(1, "<html><body>v1</body></html>");
    const client = fakeClient(v1, {
      events: [{ type: "error", data: { code: "stale-context", message: "stale" } }],
    });
    const preview = new RecordingPreview();
    const controller = new EditorController(client, preview);
    await controller.load("cw1");

    const outcome = await controller.submitInstruction(PICKED, "change it");
    expect(outcome.status).toBe("error");
    expect(outcome.errorCode).toBe("stale-context");
    expect(preview.currentHtml).toBe("<html><body>v1</body></html>");
    expect(preview.renders).toHaveLength(1); // never re-rendered
  });

  it("rejects a second submission while one is in flight", async () => {
    const v1 = coursewareAt(1, "<html><body>v1</body></html>");
    let release!: () => void;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const client = fakeClient(v1, {
      events: [{ type: "applied", data: { version: 2, attempts: 1 } }],
      afterEdit: coursewareAt(2, "<html><body>v2</body></html>"),
      gate,
    });
    const controller = new EditorController(client, new RecordingPreview());
    await controller.load("cw1");

    const first = controller.submitInstruction(PICKED, "one");
    expect(controller.busy).toBe(true);
    expect(controller.canSubmit).toBe(false);
    await expect(controller.submitInstruction(PICKED, "two")).rejects.toThrow(/in flight/);
    release();
    await first;
    expect(controller.busy).toBe(false);
    expect(controller.canSubmit).toBe(true);
  });

  it("assigns per-session citation ordinals and resets them on version change", async () => {
    const v1 = coursewareAt(1, "<html><body>v1</body></html>");
    const client = fakeClient(v1, {
      events: [{ type: "applied", data: { version: 2, attempts: 1 } }],
      afterEdit: coursewareAt(2, "<html><body>v2</body></html>"),
    });
    const controller = new EditorController(client, new RecordingPreview());
    await controller.load("cw1");

    expect(controller.handlePick(PICKED).index).toBe(1);
    expect(controller.handlePick(PICKED).index).toBe(2);
    await controller.submitInstruction(PICKED, "go");
    expect(controller.citations).toHaveLength(0);
    expect(controller.handlePick(PICKED).index).toBe(1);
  });
});
