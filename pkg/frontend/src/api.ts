// Thin typed client for the session service. Every function maps to one
// documented endpoint and returns the server payload untouched: all
// aggregation happens server-side.

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

export interface SlideView {
  deck: string;
  slide: string;
  ordinal: number | null;
  class: string;
  title: string;
  body: string;
  topics: string[];
}

export interface SessionConfig {
  deck: string;
  classes: string[];
  positive: string;
  quorum: number;
  threshold: number;
  min_support: number;
  reveal_future: boolean;
}

export interface SessionStatus {
  session: string;
  map: string;
  deck: string;
  state: "created" | "live" | "ended";
  position: number;
  length: number;
  config: SessionConfig;
  slide: SlideView | null;
}

export interface ReportRow {
  counts: Record<string, number>;
  total: number;
  flagged: boolean;
}

export interface Report {
  slides: Record<string, ReportRow>;
  totals: { counts: Record<string, number>; total: number };
  flagged: string[];
  classes: string[];
  positive: string;
  quorum: number;
  threshold: number;
}

export interface AssistanceEntry {
  deck: string;
  slide: string;
  reason: "same_subject" | "preliminary";
  depth: number | null;
  withheld: boolean;
  ordinal?: number | null;
  class?: string;
  title?: string;
  topics?: string[];
}

export interface Assistance {
  slide: string;
  entries: AssistanceEntry[];
}

export interface Mindset {
  scope: "whole_session" | "slide";
  slide?: string;
  score: number | null;
}

export interface DiscussionTopic {
  topic: string;
  new: boolean;
  slides: string[];
  associations: { type: string; roles: Record<string, string> }[];
}

export interface Discussion {
  min_support: number;
  topics: DiscussionTopic[];
}

export interface Bookmark {
  label: string;
  deck: string;
  slide: string;
  ordinal: number | null;
  owner: string;
}

export interface SlideAddress {
  deck: string;
  slide: string;
}

export interface RatingInput extends SlideAddress {
  kind: "rating";
  participant: string;
  class: string;
  at?: number;
}

export interface NoteInput extends SlideAddress {
  kind: "note";
  participant: string;
  text?: string;
  tags?: string[];
  refs?: SlideAddress[];
  at?: number;
}

export interface BookmarkInput extends SlideAddress {
  kind: "bookmark";
  participant: string;
  label: string;
  at?: number;
}

export type AnnotationInput = RatingInput | NoteInput | BookmarkInput;

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, init);
  const text = await response.text();
  let body: unknown = null;
  if (text) {
    try {
      body = JSON.parse(text);
    } catch {
      body = null;
    }
  }
  if (!response.ok) {
    const doc = (body ?? {}) as { error?: unknown; detail?: unknown };
    const code = typeof doc.error === "string" ? doc.error : `Http${response.status}`;
    const detail = typeof doc.detail === "string" ? doc.detail : response.statusText;
    throw new ApiError(response.status, code, detail);
  }
  return body as T;
}

function post<T>(base: string, path: string, payload?: unknown): Promise<T> {
  return request<T>(base, path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: payload === undefined ? undefined : JSON.stringify(payload)
  });
}

export function putMap(base: string, doc: unknown): Promise<unknown> {
  return post(base, "/maps", doc);
}

export function getMap(base: string, mapId: string): Promise<unknown> {
  return request(base, `/maps/${encodeURIComponent(mapId)}`);
}

export function mergeMaps(base: string, maps: string[], mapId?: string): Promise<unknown> {
  const body: { maps: string[]; map_id?: string } = { maps };
  if (mapId !== undefined) {
    body.map_id = mapId;
  }
  return post(base, "/maps/merge", body);
}

export function createSession(
  base: string,
  map: string,
  config: Partial<SessionConfig> = {}
): Promise<SessionStatus> {
  return post(base, "/sessions", { map, config });
}

export function startSession(base: string, session: string): Promise<SessionStatus> {
  return post(base, `/sessions/${encodeURIComponent(session)}/start`);
}

export function advanceSession(base: string, session: string): Promise<SessionStatus> {
  return post(base, `/sessions/${encodeURIComponent(session)}/advance`);
}

export function gotoSlide(base: string, session: string, ordinal: number): Promise<SessionStatus> {
  return post(base, `/sessions/${encodeURIComponent(session)}/goto/${ordinal}`);
}

export function endSession(base: string, session: string): Promise<SessionStatus> {
  return post(base, `/sessions/${encodeURIComponent(session)}/end`);
}

export function joinSession(base: string, session: string): Promise<{ participant: string }> {
  return post(base, `/sessions/${encodeURIComponent(session)}/join`);
}

export function submitAnnotation(
  base: string,
  session: string,
  annotation: AnnotationInput
): Promise<{ seq: number }> {
  return post(base, `/sessions/${encodeURIComponent(session)}/annotations`, annotation);
}

export function fetchCurrent(base: string, session: string): Promise<SessionStatus> {
  return request(base, `/sessions/${encodeURIComponent(session)}/current`);
}

export function fetchAssistance(base: string, session: string, slide: string): Promise<Assistance> {
  const key = encodeURIComponent(slide);
  return request(base, `/sessions/${encodeURIComponent(session)}/assistance?slide=${key}`);
}

export function fetchReport(base: string, session: string): Promise<Report> {
  return request(base, `/sessions/${encodeURIComponent(session)}/report`);
}

export function fetchMindset(base: string, session: string, slide?: string): Promise<Mindset> {
  const suffix = slide === undefined ? "" : `?slide=${encodeURIComponent(slide)}`;
  return request(base, `/sessions/${encodeURIComponent(session)}/mindset${suffix}`);
}

export function fetchDiscussionTopics(base: string, session: string): Promise<Discussion> {
  return request(base, `/sessions/${encodeURIComponent(session)}/discussion-topics`);
}

export function fetchBookmarks(base: string, session: string): Promise<{ bookmarks: Bookmark[] }> {
  return request(base, `/sessions/${encodeURIComponent(session)}/bookmarks`);
}
