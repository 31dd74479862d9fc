/** Debounced, single-in-flight request scheduler with last-write-wins.
 *
 * Slider drags call schedule() on every input event; the trailing-edge
 * debounce caps the request rate near 1000/DEBOUNCE_MS per second, only one
 * request is ever in flight, and a response is dropped when a newer request
 * has been issued after it.
 */

export const DEBOUNCE_MS = 200;

export class RequestScheduler<Req, Res> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private queued: Req | null = null;
  private sequence = 0;
  private rendered = 0;

  constructor(
    private readonly send: (req: Req) => Promise<Res>,
    private readonly deliver: (res: Res) => void,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  schedule(request: Req): void {
    this.queued = request;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.flush();
    }, this.debounceMs);
  }

  /** Issue immediately (initial load, replay); still serialized. */
  submitNow(request: Req): void {
    this.queued = request;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    void this.flush();
  }

  private async flush(): Promise<void> {
    if (this.inFlight || this.queued === null) {
      return;
    }
    const request = this.queued;
    this.queued = null;
    const ticket = ++this.sequence;
    this.inFlight = true;
    try {
      const response = await this.send(request);
      if (ticket > this.rendered) {
        this.rendered = ticket;
        this.deliver(response);
      }
    } catch {
      // a failed send keeps the last delivered state; the next edit retries
    } finally {
      this.inFlight = false;
      if (this.queued !== null) {
        void this.flush();
      }
    }
  }
}
