import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";

function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

function makeStressRaw(): string {
  const raw = tempDir("cli-raw-");
  for (let subject = 1; subject <= 20; subject++) {
    const rows = Array.from({ length: 8 }, (_, i) =>
      Array.from({ length: 7 }, (_, c) => subject + i + c).join(","),
    );
    writeFileSync(join(raw, `subject-${subject}.csv`), rows.join("\n") + "\n");
    const events = ["onset,label", ...rows.map((_, i) => `${i},${i % 4}`)];
    writeFileSync(
      join(raw, `subject-${subject}.events.csv`),
      events.join("\n") + "\n",
    );
  }
  return raw;
}

describe("dataprep CLI", () => {
  afterEach(() => {
    vi.restoreAllMocks();
  });

  it("lists the seven recipes", async () => {
    const lines: string[] = [];
    vi.spyOn(console, "log").mockImplementation((msg) => lines.push(String(msg)));
    expect(await main(["--list"])).toBe(0);
    expect(lines).toHaveLength(8); // header + 7 rows
    expect(lines.join("\n")).toContain("faces-noisy");
    expect(lines.join("\n")).toContain("64x480");
  });

  it("converts local raw files end to end", async () => {
    const raw = makeStressRaw();
    const out = tempDir("cli-out-");
    const lines: string[] = [];
    vi.spyOn(console, "log").mockImplementation((msg) => lines.push(String(msg)));
    expect(await main(["--dataset", "stress", "--raw", raw, "--out", out])).toBe(0);
    expect(lines.join("\n")).toContain("160 trials");
    expect(lines.join("\n")).toContain("20 subjects");
  });

  it("refuses the ethics-gated dataset without the flag", async () => {
    const errors: string[] = [];
    vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
    const code = await main([
      "--dataset", "faces-noisy", "--raw", tempDir("x-"), "--out", tempDir("y-"),
    ]);
    expect(code).toBe(2);
    expect(errors.join("\n")).toContain("ethics");
  });

  it("rejects unknown datasets with the known list", async () => {
    const errors: string[] = [];
    vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
    expect(await main(["--dataset", "bogus", "--out", tempDir("z-")])).toBe(2);
    expect(errors.join("\n")).toContain("known:");
  });

  it("requires --files when fetching", async () => {
    const errors: string[] = [];
    vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
    expect(await main(["--dataset", "stress", "--out", tempDir("w-")])).toBe(2);
    expect(errors.join("\n")).toContain("--files");
  });

  it("rejects unknown flags", async () => {
    const errors: string[] = [];
    vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
    expect(await main(["--dataset", "stress", "--frobnicate"])).toBe(2);
  });

  it("propagates dim mismatches as exit 2", async () => {
    const raw = makeStressRaw();
    writeFileSync(join(raw, "subject-2.csv"), "1,2,3\n4,5,6\n");
    const errors: string[] = [];
    vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
    const code = await main([
      "--dataset", "stress", "--raw", raw, "--out", tempDir("v-"),
    ]);
    expect(code).toBe(2);
    expect(errors.join("\n")).toContain("channels");
  });
});
