import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { EthicsError, IntegrityError } from "../src/errors.js";
import { fetchRaw, sha256Hex } from "../src/fetch.js";
import { getRecipe } from "../src/recipes.js";

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "fetch-"));
}

function stubTransport(payloads: Record<string, string>) {
  const calls: string[] = [];
  const transport = async (url: string) => {
    calls.push(url);
    for (const [suffix, body] of Object.entries(payloads)) {
      if (url.endsWith(suffix)) {
        return new TextEncoder().encode(body);
      }
    }
    throw new Error(`stub has no payload for ${url}`);
  };
  return { transport, calls };
}

describe("fetch with cache and checksums", () => {
  it("downloads cold files and records their checksums", async () => {
    const cacheDir = tempDir();
    const { transport, calls } = stubTransport({ "subject-1.csv": "1,2\n3,4\n" });
    const fetched = await fetchRaw(getRecipe("stress"), {
      cacheDir,
      transport,
      files: ["subject-1.csv"],
    });
    expect(fetched.downloaded).toBe(1);
    expect(calls).toHaveLength(1);
    expect(calls[0]).toContain("physionet.org");
    const sums = JSON.parse(
      readFileSync(join(cacheDir, "stress", "checksums.json"), "utf-8"),
    );
    expect(sums["subject-1.csv"]).toBe(
      sha256Hex(new TextEncoder().encode("1,2\n3,4\n")),
    );
  });

  it("makes no network calls on a warm cache", async () => {
    const cacheDir = tempDir();
    const { transport, calls } = stubTransport({ "a.csv": "5,6\n" });
    await fetchRaw(getRecipe("stress"), { cacheDir, transport, files: ["a.csv"] });
    const second = await fetchRaw(getRecipe("stress"), {
      cacheDir,
      transport,
      files: ["a.csv"],
    });
    expect(second.downloaded).toBe(0);
    expect(calls).toHaveLength(1);
  });

  it("raises IntegrityError when a cached file was tampered with", async () => {
    const cacheDir = tempDir();
    const { transport } = stubTransport({ "a.csv": "5,6\n" });
    await fetchRaw(getRecipe("stress"), { cacheDir, transport, files: ["a.csv"] });
    writeFileSync(join(cacheDir, "stress", "a.csv"), "tampered");
    await expect(
      fetchRaw(getRecipe("stress"), { cacheDir, transport, files: ["a.csv"] }),
    ).rejects.toThrow(IntegrityError);
  });

  it("refuses the scrambled-faces dataset without the ethics flag", async () => {
    const { transport, calls } = stubTransport({});
    await expect(
      fetchRaw(getRecipe("faces-noisy"), {
        cacheDir: tempDir(),
        transport,
        files: ["subject-1.mat"],
      }),
    ).rejects.toThrow(EthicsError);
    expect(calls).toHaveLength(0); // refused before any traffic
  });

  it("proceeds with the ethics flag set", async () => {
    const { transport } = stubTransport({ "subject-1.mat": "stub" });
    const fetched = await fetchRaw(getRecipe("faces-noisy"), {
      cacheDir: tempDir(),
      transport,
      acknowledgeEthics: true,
      files: ["subject-1.mat"],
    });
    expect(fetched.downloaded).toBe(1);
  });
});
