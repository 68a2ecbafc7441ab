/** Wire types shared with the editing service. Field names match the HTTP schema exactly. */

export interface PickedElement {
  xpath: string;
  css_selector: string;
  snippet: string; // element serialization truncated to 500 characters
  bounding_box: [number, number, number, number] | null;
}

export interface EditRequestBody {
  element_selector: PickedElement;
  instruction: string;
  context_html: string;
}

export interface EditEvent {
  type: string; // token | diff | applied | regenerated | error
  data: Record<string, unknown>;
}

export interface VersionInfo {
  version: number;
  created_at: number;
  origin: string;
  level: string | null;
  html?: string;
}

export interface CoursewareInfo {
  id: string;
  knowledge: Record<string, unknown>;
  theme: { primary_color: string; accent_color: string; subject_area: string };
  versions: VersionInfo[];
  current_version: number;
}

export interface Citation {
  index: number; // per-session ordinal, starts at 1, resets on version change
  picked: PickedElement;
}
