export type UiPhase = "idle" | "drawing" | "awaiting-response" | "candidates-shown";

/** UI session state: drawing phase plus latest-wins request sequencing.
 *
 * Every pen-up issues a recognition request tagged with a sequence number;
 * a response is applied only when no newer request has been issued since.
 */
export class SessionState {
  phase: UiPhase = "idle";
  private seq = 0;

  beginDrawing(): void {
    this.phase = "drawing";
  }

  /** Returns the ticket for the request triggered by this pen-up. */
  penUp(): number {
    this.phase = "awaiting-response";
    this.seq += 1;
    return this.seq;
  }

  /** True when the response for `ticket` is still the latest one. */
  accept(ticket: number): boolean {
    if (ticket !== this.seq) return false;
    this.phase = "candidates-shown";
    return true;
  }

  reset(): void {
    this.phase = "idle";
    this.seq += 1; // invalidate any in-flight response
  }

  get currentTicket(): number {
    return this.seq;
  }
}
