/** Page navigation: thumbnails of uploaded pages, selection scoping analysis. */

import type { CourseforgeClient } from "./api.js";

export interface PageThumb {
  index: number;
  file: File;
}

export class PageNavigation {
  readonly pages: PageThumb[];
  private selected = new Set<number>();

  constructor(files: File[]) {
    this.pages = files.map((file, index) => ({ index, file }));
  }

  toggle(index: number): void {
    if (index < 0 || index >= this.pages.length) return;
    if (this.selected.has(index)) this.selected.delete(index);
    else this.selected.add(index);
  }

  selectAll(): void {
    for (const page of this.pages) this.selected.add(page.index);
  }

  clear(): void {
    this.selected.clear();
  }

  /** Selected pages in document order; these are the images analysis sees. */
  get selectedPages(): File[] {
    return this.pages.filter((p) => this.selected.has(p.index)).map((p) => p.file);
  }

  /** Analysis stays disabled while nothing is selected. */
  get canAnalyze(): boolean {
    return this.selected.size > 0;
  }

  async analyzeSelection(
    client: CourseforgeClient
  ): Promise<{ documentId: string; knowledge: Record<string, unknown> }> {
    if (!this.canAnalyze) throw new Error("no pages selected");
    const upload = await client.uploadDocument(this.selectedPages);
    const knowledge = await client.analyzeDocument(upload.document_id);
    return { documentId: upload.document_id, knowledge };
  }
}
