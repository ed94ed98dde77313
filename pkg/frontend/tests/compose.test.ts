import { describe, expect, it } from "vitest";

import { CompositionBuffer } from "../src/compose.js";

describe("CompositionBuffer", () => {
  it("selecting candidates grows the buffer", () => {
    const buffer = new CompositionBuffer();
    buffer.push("永");
    buffer.push("和");
    expect(buffer.length).toBe(2);
    expect(buffer.text).toBe("永和");
  });

  it("backspace removes the last label only", () => {
    const buffer = new CompositionBuffer();
    buffer.push("a");
    buffer.push("b");
    expect(buffer.backspace()).toBe(true);
    expect(buffer.text).toBe("a");
    expect(buffer.backspace()).toBe(true);
    expect(buffer.backspace()).toBe(false);
    expect(buffer.text).toBe("");
  });

  it("clear resets the buffer", () => {
    const buffer = new CompositionBuffer();
    buffer.push("x");
    buffer.clear();
    expect(buffer.length).toBe(0);
  });
});
