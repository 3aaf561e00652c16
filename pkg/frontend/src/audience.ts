// Audience view: live slide, rating buttons, notes with tags, bookmarks,
// and an assistance panel. Mounts into a root element and talks to the
// session service only through the documented endpoints.

import {
  ApiError,
  fetchAssistance,
  fetchCurrent,
  joinSession,
  submitAnnotation,
  type SessionStatus
} from "./api.js";
import { renderAssistance, renderRatingButtons, renderSlide } from "./render.js";
import { subscribeEvents, type SessionEvent } from "./stream.js";

export interface AudienceHandle {
  ready: Promise<void>;
  close: () => void;
}

const SKELETON = `
  <div class="topbar">
    <span id="session-label" class="muted"></span>
    <span id="connection" class="badge">connecting</span>
  </div>
  <section id="slide-panel"></section>
  <section>
    <div id="rating-row" class="button-row"></div>
    <p id="ack" class="muted"></p>
  </section>
  <section>
    <form id="note-form" class="stack">
      <textarea name="text" rows="2" placeholder="Leave a note"></textarea>
      <input name="tags" type="text" placeholder="Tags, comma separated" />
      <button type="submit" disabled>Send note</button>
    </form>
    <form id="bookmark-form" class="row">
      <input name="label" type="text" placeholder="Bookmark label" required />
      <button type="submit" disabled>Bookmark</button>
    </form>
  </section>
  <section>
    <button id="assist-btn" type="button" disabled>Need assistance</button>
    <div id="assist-panel"></div>
  </section>
  <p id="message" class="error"></p>
`;

function splitTags(raw: string): string[] {
  return raw
    .split(",")
    .map((tag) => tag.trim())
    .filter((tag) => tag.length > 0);
}

export function mountAudience(root: HTMLElement, base: string, session: string): AudienceHandle {
  root.innerHTML = SKELETON;
  const pick = <T extends HTMLElement>(selector: string) => root.querySelector(selector) as T;
  const connection = pick<HTMLElement>("#connection");
  const slidePanel = pick<HTMLElement>("#slide-panel");
  const ratingRow = pick<HTMLElement>("#rating-row");
  const ack = pick<HTMLElement>("#ack");
  const noteForm = pick<HTMLFormElement>("#note-form");
  const bookmarkForm = pick<HTMLFormElement>("#bookmark-form");
  const assistBtn = pick<HTMLButtonElement>("#assist-btn");
  const assistPanel = pick<HTMLElement>("#assist-panel");
  const message = pick<HTMLElement>("#message");

  let status: SessionStatus | null = null;
  let participant: string | null = null;
  let ended = false;

  const showError = (err: unknown) => {
    if (err instanceof ApiError) {
      message.textContent = `${err.code}: ${err.message}`;
    } else {
      message.textContent = err instanceof Error ? err.message : String(err);
    }
  };

  const setControlsEnabled = (enabled: boolean) => {
    const on = enabled && !ended;
    root.querySelectorAll<HTMLButtonElement>("button").forEach((button) => {
      button.disabled = !on;
    });
  };

  const applyStatus = (next: SessionStatus) => {
    status = next;
    pick<HTMLElement>("#session-label").textContent =
      `${next.map} / ${next.deck} · slide ${next.position} of ${next.length}`;
    slidePanel.innerHTML = renderSlide(next.slide);
    if (ratingRow.childElementCount === 0) {
      ratingRow.innerHTML = renderRatingButtons(next.config.classes, next.config.positive);
    }
    if (next.state === "ended") {
      ended = true;
      setControlsEnabled(false);
      connection.textContent = "ended";
    }
  };

  const refresh = async () => {
    try {
      applyStatus(await fetchCurrent(base, session));
      message.textContent = "";
    } catch (err) {
      showError(err);
    }
  };

  const currentSlideKey = (): string | null => {
    if (!status || !status.slide) {
      return null;
    }
    return `${status.slide.deck}/${status.slide.slide}`;
  };

  ratingRow.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button.rate") as HTMLButtonElement | null;
    if (!button || !participant || !status || !status.slide) {
      return;
    }
    const payload = {
      kind: "rating" as const,
      participant,
      deck: status.slide.deck,
      slide: status.slide.slide,
      class: button.dataset.class ?? "",
      at: Date.now()
    };
    submitAnnotation(base, session, payload)
      .then((reply) => {
        ack.textContent = `${payload.class} on ${payload.deck}/${payload.slide} accepted (seq ${reply.seq})`;
        message.textContent = "";
      })
      .catch(showError);
  });

  const noteText = noteForm.querySelector("textarea[name=text]") as HTMLTextAreaElement;
  const noteTags = noteForm.querySelector("input[name=tags]") as HTMLInputElement;
  const bookmarkLabel = bookmarkForm.querySelector("input[name=label]") as HTMLInputElement;

  noteForm.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!participant || !status || !status.slide) {
      return;
    }
    const text = noteText.value.trim();
    const tags = splitTags(noteTags.value);
    if (!text && tags.length === 0) {
      return;
    }
    submitAnnotation(base, session, {
      kind: "note",
      participant,
      deck: status.slide.deck,
      slide: status.slide.slide,
      text: text || undefined,
      tags,
      at: Date.now()
    })
      .then((reply) => {
        ack.textContent = `note accepted (seq ${reply.seq})`;
        message.textContent = "";
        noteForm.reset();
      })
      .catch(showError);
  });

  bookmarkForm.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!participant || !status || !status.slide) {
      return;
    }
    const label = bookmarkLabel.value.trim();
    if (!label) {
      return;
    }
    submitAnnotation(base, session, {
      kind: "bookmark",
      participant,
      deck: status.slide.deck,
      slide: status.slide.slide,
      label,
      at: Date.now()
    })
      .then((reply) => {
        ack.textContent = `bookmark accepted (seq ${reply.seq})`;
        message.textContent = "";
        bookmarkForm.reset();
      })
      .catch(showError);
  });

  assistBtn.addEventListener("click", () => {
    const key = currentSlideKey();
    if (!key) {
      return;
    }
    fetchAssistance(base, session, key)
      .then((reply) => {
        assistPanel.innerHTML = renderAssistance(reply.entries);
        message.textContent = "";
      })
      .catch(showError);
  });

  const onEvent = (event: SessionEvent) => {
    if (event.type === "SlideChanged") {
      assistPanel.innerHTML = "";
      void refresh();
    } else if (event.type === "SessionEnded") {
      ended = true;
      setControlsEnabled(false);
      void refresh();
    }
  };

  const closeStream = subscribeEvents(base, session, {
    onEvent,
    onStatus: (state) => {
      if (!ended) {
        connection.textContent = state === "retrying" ? "reconnecting" : state;
      }
    }
  });

  const ready = (async () => {
    applyStatus(await fetchCurrent(base, session));
    const joined = await joinSession(base, session);
    participant = joined.participant;
    root.dataset.participant = participant;
    setControlsEnabled(true);
  })().catch((err) => {
    showError(err);
    throw err;
  });

  return {
    ready,
    close: () => {
      closeStream();
    }
  };
}
