// Lecturer dashboard: corridor strip with navigation, per-slide rating
// distribution with flagged slides highlighted, mindset score, discussion
// topics, and bookmarks. Every figure shown is fetched from the service.

import {
  ApiError,
  advanceSession,
  endSession,
  fetchBookmarks,
  fetchCurrent,
  fetchDiscussionTopics,
  fetchMindset,
  fetchReport,
  gotoSlide,
  startSession,
  type SessionStatus
} from "./api.js";
import {
  renderBookmarks,
  renderCorridor,
  renderDiscussion,
  renderMindset,
  renderReport,
  renderSlide
} from "./render.js";
import { subscribeEvents, type SessionEvent } from "./stream.js";

export interface DashboardHandle {
  ready: Promise<void>;
  close: () => void;
}

const SKELETON = `
  <div class="topbar">
    <span id="session-label" class="muted"></span>
    <span id="connection" class="badge">connecting</span>
  </div>
  <section>
    <div id="corridor-strip"></div>
    <div class="button-row">
      <button id="start-btn" type="button">Start</button>
      <button id="advance-btn" type="button">Advance</button>
      <input id="goto-input" type="number" min="1" value="1" />
      <button id="goto-btn" type="button">Go to</button>
      <button id="end-btn" type="button">End session</button>
    </div>
  </section>
  <section id="slide-panel"></section>
  <section>
    <h3>Comprehension</h3>
    <div id="report-panel"></div>
  </section>
  <section>
    <h3>Mindset correlation</h3>
    <div id="mindset-panel"></div>
  </section>
  <section>
    <h3>Discussion topics</h3>
    <div id="discussion-panel"></div>
  </section>
  <section>
    <h3>Bookmarks</h3>
    <div id="bookmark-panel"></div>
  </section>
  <p id="message" class="error"></p>
`;

export function mountDashboard(root: HTMLElement, base: string, session: string): DashboardHandle {
  root.innerHTML = SKELETON;
  const pick = <T extends HTMLElement>(selector: string) => root.querySelector(selector) as T;
  const connection = pick<HTMLElement>("#connection");
  const corridorStrip = pick<HTMLElement>("#corridor-strip");
  const slidePanel = pick<HTMLElement>("#slide-panel");
  const reportPanel = pick<HTMLElement>("#report-panel");
  const mindsetPanel = pick<HTMLElement>("#mindset-panel");
  const discussionPanel = pick<HTMLElement>("#discussion-panel");
  const bookmarkPanel = pick<HTMLElement>("#bookmark-panel");
  const gotoInput = pick<HTMLInputElement>("#goto-input");
  const message = pick<HTMLElement>("#message");

  let status: SessionStatus | null = null;
  let ended = false;

  const showError = (err: unknown) => {
    if (err instanceof ApiError) {
      message.textContent = `${err.code}: ${err.message}`;
    } else {
      message.textContent = err instanceof Error ? err.message : String(err);
    }
  };

  const setControlsEnabled = (enabled: boolean) => {
    root.querySelectorAll<HTMLButtonElement>("button").forEach((button) => {
      button.disabled = !enabled;
    });
    gotoInput.disabled = !enabled;
  };

  const applyStatus = (next: SessionStatus) => {
    status = next;
    pick<HTMLElement>("#session-label").textContent =
      `${next.map} / ${next.deck} · ${next.state} · slide ${next.position} of ${next.length}`;
    corridorStrip.innerHTML = renderCorridor(next.length, next.position, next.state === "live");
    slidePanel.innerHTML = renderSlide(next.slide);
    if (next.state === "ended" && !ended) {
      ended = true;
      setControlsEnabled(false);
      connection.textContent = "ended";
    }
  };

  const refreshPanels = async () => {
    try {
      const [report, mindset, discussion, bookmarks] = await Promise.all([
        fetchReport(base, session),
        fetchMindset(base, session),
        fetchDiscussionTopics(base, session),
        fetchBookmarks(base, session)
      ]);
      reportPanel.innerHTML = renderReport(report);
      mindsetPanel.innerHTML = renderMindset(mindset.score);
      discussionPanel.innerHTML = renderDiscussion(discussion.topics);
      bookmarkPanel.innerHTML = renderBookmarks(bookmarks.bookmarks);
    } catch (err) {
      showError(err);
    }
  };

  const drive = (call: Promise<SessionStatus>) => {
    call
      .then((next) => {
        applyStatus(next);
        message.textContent = "";
      })
      .catch(showError);
  };

  pick<HTMLButtonElement>("#start-btn").addEventListener("click", () => {
    drive(startSession(base, session));
  });
  pick<HTMLButtonElement>("#advance-btn").addEventListener("click", () => {
    drive(advanceSession(base, session));
  });
  pick<HTMLButtonElement>("#goto-btn").addEventListener("click", () => {
    const ordinal = Number(gotoInput.value);
    if (!Number.isInteger(ordinal)) {
      return;
    }
    drive(gotoSlide(base, session, ordinal));
  });
  pick<HTMLButtonElement>("#end-btn").addEventListener("click", () => {
    drive(endSession(base, session));
  });
  corridorStrip.addEventListener("click", (event) => {
    const cell = (event.target as HTMLElement).closest(".cell") as HTMLElement | null;
    if (!cell || ended) {
      return;
    }
    drive(gotoSlide(base, session, Number(cell.dataset.ordinal)));
  });

  const onEvent = (event: SessionEvent) => {
    if (event.type === "SlideChanged") {
      const data = event.data as { position: number };
      if (!status || status.position !== data.position || !status.slide) {
        fetchCurrent(base, session).then(applyStatus).catch(showError);
      }
    } else if (event.type === "AnnotationAccepted") {
      void refreshPanels();
    } else if (event.type === "SessionEnded") {
      ended = true;
      setControlsEnabled(false);
      fetchCurrent(base, session).then(applyStatus).catch(showError);
      // final report stays frozen on screen
      void refreshPanels();
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
    await refreshPanels();
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
