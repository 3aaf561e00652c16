// Event stream subscription with automatic resume. The stream is read via
// fetch so the same code runs in browsers and under node; reconnection
// always passes the last sequence number seen, so no event is lost over a
// flaky connection.

export type EventType = "SlideChanged" | "AnnotationAccepted" | "SessionEnded";

export interface SlideChangedData {
  position: number;
  length: number;
  deck: string;
  slide: string;
}

export interface AnnotationAcceptedData {
  seq: number;
  kind: string;
  deck: string;
  slide: string;
  counters: Record<string, number>;
}

export interface SessionEndedData {
  position: number;
}

export interface SessionEvent {
  seq: number;
  type: EventType;
  data: SlideChangedData | AnnotationAcceptedData | SessionEndedData;
}

export type StreamStatus = "connecting" | "open" | "retrying" | "closed";

export interface StreamHandlers {
  onEvent: (event: SessionEvent) => void;
  onStatus?: (status: StreamStatus) => void;
}

const RETRY_DELAY_MS = 1500;

function fieldValue(line: string, cut: number): string {
  const value = line.slice(cut + 1);
  return value.startsWith(" ") ? value.slice(1) : value;
}

/** Parse one frame (the text between blank lines). Comment-only frames
 * such as keepalives yield null. */
export function parseEventFrame(frame: string): SessionEvent | null {
  let seq = 0;
  let type = "";
  const dataLines: string[] = [];
  for (const line of frame.split("\n")) {
    if (line === "" || line.startsWith(":")) {
      continue;
    }
    const cut = line.indexOf(":");
    const field = cut === -1 ? line : line.slice(0, cut);
    const value = cut === -1 ? "" : fieldValue(line, cut);
    if (field === "id") {
      seq = Number(value);
    } else if (field === "event") {
      type = value;
    } else if (field === "data") {
      dataLines.push(value);
    }
  }
  if (type === "" && dataLines.length === 0) {
    return null;
  }
  return {
    seq,
    type: type as EventType,
    data: dataLines.length > 0 ? JSON.parse(dataLines.join("\n")) : null
  };
}

/** Feed incoming text chunks, get complete frames out. */
export class FrameSplitter {
  private buffer = "";

  push(chunk: string): string[] {
    this.buffer += chunk;
    const frames: string[] = [];
    let cut;
    while ((cut = this.buffer.indexOf("\n\n")) !== -1) {
      frames.push(this.buffer.slice(0, cut));
      this.buffer = this.buffer.slice(cut + 2);
    }
    return frames;
  }
}

/**
 * Subscribe to a session's event stream starting after `fromSeq`.
 * Delivers events in order, reconnects on connection loss resuming from
 * the last sequence number seen, and stops itself after SessionEnded.
 * Returns a close function.
 */
export function subscribeEvents(
  base: string,
  session: string,
  handlers: StreamHandlers,
  fromSeq = 0
): () => void {
  let lastSeq = fromSeq;
  let closed = false;
  let retryTimer: ReturnType<typeof setTimeout> | null = null;
  let controller: AbortController | null = null;

  const connect = async () => {
    controller = new AbortController();
    handlers.onStatus?.("connecting");
    try {
      const url = `${base}/sessions/${encodeURIComponent(session)}/events?from=${lastSeq}`;
      const response = await fetch(url, {
        headers: { accept: "text/event-stream" },
        signal: controller.signal
      });
      if (!response.ok || !response.body) {
        throw new Error(`event stream refused: ${response.status}`);
      }
      handlers.onStatus?.("open");
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      const splitter = new FrameSplitter();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) {
          break;
        }
        for (const frame of splitter.push(decoder.decode(value, { stream: true }))) {
          const event = parseEventFrame(frame);
          if (!event) {
            continue;
          }
          lastSeq = event.seq;
          handlers.onEvent(event);
          if (event.type === "SessionEnded") {
            closed = true;
            controller.abort();
            handlers.onStatus?.("closed");
            return;
          }
        }
      }
      // server went away without ending the session
      throw new Error("event stream interrupted");
    } catch {
      if (closed) {
        return;
      }
      handlers.onStatus?.("retrying");
      retryTimer = setTimeout(() => {
        void connect();
      }, RETRY_DELAY_MS);
    }
  };

  void connect();
  return () => {
    closed = true;
    if (retryTimer) {
      clearTimeout(retryTimer);
    }
    controller?.abort();
  };
}
