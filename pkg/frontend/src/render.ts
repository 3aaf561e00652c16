// HTML fragment renderers shared by the audience view and the lecturer
// dashboard. All functions are pure: payload in, markup out. Every number
// shown comes straight from a service payload; nothing is recomputed here.

import type {
  AssistanceEntry,
  Bookmark,
  DiscussionTopic,
  Report,
  SlideView
} from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSlide(slide: SlideView | null): string {
  if (!slide) {
    return `<p class="muted">Waiting for the session to start...</p>`;
  }
  const anchors = slide.topics
    .map((topic) => `<span class="chip">${escapeHtml(topic)}</span>`)
    .join("");
  const ordinal = slide.ordinal === null ? "suppl." : `#${slide.ordinal}`;
  return `
    <div class="slide" data-deck="${escapeHtml(slide.deck)}" data-slide="${escapeHtml(slide.slide)}">
      <p class="muted">${escapeHtml(slide.deck)}/${escapeHtml(slide.slide)} &middot; ${ordinal} &middot; ${escapeHtml(slide.class)}</p>
      <h2>${escapeHtml(slide.title)}</h2>
      <p class="body">${escapeHtml(slide.body)}</p>
      <div class="chips">${anchors}</div>
    </div>
  `;
}

export function renderRatingButtons(classes: string[], positive: string): string {
  return classes
    .map((label) => {
      const tone = label === positive ? "positive" : "negative";
      return `<button type="button" class="rate ${tone}" data-class="${escapeHtml(label)}">${escapeHtml(label)}</button>`;
    })
    .join("");
}

export function renderAssistance(entries: AssistanceEntry[]): string {
  if (entries.length === 0) {
    return `<p class="muted">No auxiliary material for this slide.</p>`;
  }
  const items = entries
    .map((entry) => {
      const reason =
        entry.reason === "same_subject" ? "same subject" : `preliminary, depth ${entry.depth}`;
      const title = entry.withheld
        ? `<span class="muted">upcoming slide</span>`
        : `<strong>${escapeHtml(entry.title ?? "")}</strong>`;
      return `
        <li data-slide="${escapeHtml(entry.slide)}" class="${entry.withheld ? "withheld" : ""}">
          <span class="chip">${reason}</span>
          <span class="muted">${escapeHtml(entry.deck)}/${escapeHtml(entry.slide)}</span>
          ${title}
        </li>
      `;
    })
    .join("");
  return `<ol class="assistance">${items}</ol>`;
}

export function renderReport(report: Report): string {
  const rows = Object.entries(report.slides)
    .map(([key, row]) => {
      const bars = report.classes
        .map((label) => {
          const count = row.counts[label] ?? 0;
          // widths only style the bar; the displayed figure is the count itself
          const width = row.total > 0 ? (count / row.total) * 100 : 0;
          const tone = label === report.positive ? "positive" : "negative";
          return `
            <div class="bar-row">
              <span class="bar-label">${escapeHtml(label)}</span>
              <div class="bar-track"><div class="bar ${tone}" style="width:${width}%"></div></div>
              <span class="bar-count">${count}</span>
            </div>
          `;
        })
        .join("");
      return `
        <div class="report-row ${row.flagged ? "flagged" : ""}" data-key="${escapeHtml(key)}">
          <div class="report-head">
            <strong>${escapeHtml(key)}</strong>
            <span class="muted">${row.total} rating${row.total === 1 ? "" : "s"}</span>
            ${row.flagged ? `<span class="flag">flagged</span>` : ""}
          </div>
          ${bars}
        </div>
      `;
    })
    .join("");
  return `<div class="report">${rows}</div>`;
}

export function renderMindset(score: number | null): string {
  const shown = score === null ? "&mdash;" : score.toFixed(2);
  return `<span class="mindset-score">${shown}</span>`;
}

export function renderDiscussion(topics: DiscussionTopic[]): string {
  if (topics.length === 0) {
    return `<p class="muted">No discussion topics yet.</p>`;
  }
  const items = topics
    .map((topic) => {
      const slides = topic.slides.map(escapeHtml).join(", ");
      return `
        <li data-topic="${escapeHtml(topic.topic)}">
          <strong>${escapeHtml(topic.topic)}</strong>
          ${topic.new ? `<span class="chip">new</span>` : ""}
          <span class="muted">${slides}</span>
        </li>
      `;
    })
    .join("");
  return `<ul class="discussion">${items}</ul>`;
}

export function renderBookmarks(bookmarks: Bookmark[]): string {
  if (bookmarks.length === 0) {
    return `<p class="muted">No bookmarks yet.</p>`;
  }
  const items = bookmarks
    .map((mark) => {
      const ordinal = mark.ordinal === null ? "suppl." : `#${mark.ordinal}`;
      return `
        <li>
          <strong>${escapeHtml(mark.label)}</strong>
          <span class="muted">${escapeHtml(mark.deck)}/${escapeHtml(mark.slide)} ${ordinal}</span>
          <span class="chip">${escapeHtml(mark.owner)}</span>
        </li>
      `;
    })
    .join("");
  return `<ul class="bookmarks">${items}</ul>`;
}

export function renderCorridor(length: number, position: number, live: boolean): string {
  const cells = [];
  for (let ordinal = 1; ordinal <= length; ordinal += 1) {
    const current = live && ordinal === position ? "current" : "";
    cells.push(`<span class="cell ${current}" data-ordinal="${ordinal}">${ordinal}</span>`);
  }
  return `<div class="corridor">${cells.join("")}</div>`;
}
