/** Editing session controller: pick, instruct, stream, swap preview.
 *
 * The preview document is only ever replaced with a server-confirmed
 * version; error terminals leave it untouched. At most one edit may be in
 * flight per courseware; submissions are rejected until the stream ends.
 */

import type { CourseforgeClient } from "./api.js";
import type { Citation, CoursewareInfo, EditEvent, PickedElement } from "./types.js";

export interface PreviewLike {
  currentHtml: string | null;
  render(html: string): void;
}

export interface EditOutcome {
  status: "applied" | "regenerated" | "error";
  events: EditEvent[];
  version?: number;
  errorCode?: string;
  errorMessage?: string;
  latencyMs: number;
}

export class EditorController {
  citations: Citation[] = [];
  courseware: CoursewareInfo | null = null;
  busy = false;
  /** measured wall time of the last edit; displayed, never asserted */
  lastLatencyMs: number | null = null;

  constructor(
    private client: CourseforgeClient,
    private preview: PreviewLike,
    private now: () => number = () => Date.now()
  ) {}

  async load(coursewareId: string): Promise<void> {
    this.courseware = await this.client.getCourseware(coursewareId);
    this.preview.render(this.currentVersionHtml());
    this.citations = []; // ordinals reset on version change
  }

  currentVersionHtml(): string {
    if (!this.courseware) throw new Error("no courseware loaded");
    const current = this.courseware.versions.find(
      (v) => v.version === this.courseware!.current_version
    );
    if (!current || current.html === undefined) {
      throw new Error("current version is missing its html payload");
    }
    return current.html;
  }

  handlePick(picked: PickedElement): Citation {
    const citation: Citation = { index: this.citations.length + 1, picked };
    this.citations.push(citation);
    return citation;
  }

  get canSubmit(): boolean {
    return !this.busy && this.courseware !== null;
  }

  async submitInstruction(picked: PickedElement, instruction: string): Promise<EditOutcome> {
    if (!this.courseware) throw new Error("no courseware loaded");
    if (this.busy) throw new Error("an edit is already in flight");
    this.busy = true;
    const startedAt = this.now();
    const events: EditEvent[] = [];
    try {
      const stream = this.client.submitEdit(this.courseware.id, {
        element_selector: picked,
        instruction,
        context_html: this.currentVersionHtml(),
      });
      for await (const event of stream) {
        events.push(event);
        if (event.type === "applied" || event.type === "regenerated") {
          await this.refresh();
          this.lastLatencyMs = this.now() - startedAt;
          return {
            status: event.type,
            events,
            version: event.data.version as number,
            latencyMs: this.lastLatencyMs,
          };
        }
        if (event.type === "error") {
          this.lastLatencyMs = this.now() - startedAt;
          return {
            status: "error",
            events,
            errorCode: event.data.code as string,
            errorMessage: event.data.message as string,
            latencyMs: this.lastLatencyMs,
          };
        }
      }
      this.lastLatencyMs = this.now() - startedAt;
      return {
        status: "error",
        events,
        errorMessage: "stream ended without a terminal event",
        latencyMs: this.lastLatencyMs,
      };
    } finally {
      this.busy = false;
    }
  }

  private async refresh(): Promise<void> {
    if (!this.courseware) return;
    this.courseware = await this.client.getCourseware(this.courseware.id);
    this.preview.render(this.currentVersionHtml());
    this.citations = [];
  }
}
