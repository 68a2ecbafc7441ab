/** Typed client for the courseware service HTTP API. */

import { readEventStream } from "./sse.js";
import type { CoursewareInfo, EditEvent, EditRequestBody, VersionInfo } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    const text = await response.text();
    throw new ApiError(response.status, text || response.statusText);
  }
  return response;
}

export class CourseforgeClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async uploadDocument(files: File[]): Promise<{ document_id: string; page_count: number }> {
    const form = new FormData();
    for (const file of files) form.append("files", file);
    const response = await expectOk(
      await fetch(this.url("/documents"), { method: "POST", body: form })
    );
    return response.json();
  }

  async analyzeDocument(documentId: string): Promise<Record<string, unknown>> {
    const response = await expectOk(
      await fetch(this.url(`/documents/${documentId}/analyze`), { method: "POST" })
    );
    return response.json();
  }

  async createCourseware(body: {
    knowledge?: Record<string, unknown>;
    document_id?: string;
  }): Promise<CoursewareInfo> {
    const response = await expectOk(
      await fetch(this.url("/coursewares"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      })
    );
    return response.json();
  }

  async getCourseware(coursewareId: string): Promise<CoursewareInfo> {
    const response = await expectOk(await fetch(this.url(`/coursewares/${coursewareId}`)));
    return response.json();
  }

  async listVersions(
    coursewareId: string
  ): Promise<{ current_version: number; versions: VersionInfo[] }> {
    const response = await expectOk(
      await fetch(this.url(`/coursewares/${coursewareId}/versions`))
    );
    return response.json();
  }

  async rollback(coursewareId: string, version: number): Promise<CoursewareInfo> {
    const response = await expectOk(
      await fetch(this.url(`/coursewares/${coursewareId}/rollback`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ version }),
      })
    );
    return response.json();
  }

  async *submitEdit(coursewareId: string, body: EditRequestBody): AsyncGenerator<EditEvent> {
    const response = await expectOk(
      await fetch(this.url(`/coursewares/${coursewareId}/edits`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      })
    );
    if (!response.body) {
      throw new ApiError(response.status, "edit response had no stream body");
    }
    yield* readEventStream(response.body);
  }
}
