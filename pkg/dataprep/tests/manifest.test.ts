import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { RecipeError } from "../src/errors.js";
import {
  readManifest,
  validateDataset,
  writeManifest,
  type DatasetManifest,
} from "../src/manifest.js";
import { writeTensor } from "../src/qtns.js";

function makeValidDataset(): { dir: string; manifestPath: string } {
  const dir = mkdtempSync(join(tmpdir(), "manifest-"));
  writeTensor(join(dir, "x.qtns"), [4, 3, 2], new Float32Array(24).fill(0.5));
  writeTensor(join(dir, "y.qtns"), [4], Float32Array.from([0, 1, 1, 0]));
  const manifest: DatasetManifest = {
    name: "toy",
    modality: "eeg",
    channels: 3,
    time: 2,
    num_classes: 2,
    subjects: 1,
    files: [{ tensor: "x.qtns", labels: "y.qtns", subject: 0 }],
  };
  const manifestPath = join(dir, "manifest.json");
  writeManifest(manifestPath, manifest);
  return { dir, manifestPath };
}

describe("manifest round trip and validation", () => {
  it("round-trips through write/read", () => {
    const { manifestPath } = makeValidDataset();
    const manifest = readManifest(manifestPath);
    expect(manifest.name).toBe("toy");
    expect(manifest.files[0]!.subject).toBe(0);
  });

  it("validates a consistent dataset", () => {
    const { manifestPath } = makeValidDataset();
    const summary = validateDataset(manifestPath);
    expect(summary.trials).toBe(4);
    expect(summary.subjects).toBe(1);
  });

  it("catches dim disagreements", () => {
    const { dir, manifestPath } = makeValidDataset();
    writeTensor(join(dir, "x.qtns"), [4, 5, 2], new Float32Array(40));
    expect(() => validateDataset(manifestPath)).toThrow(RecipeError);
  });

  it("catches label-count and label-range violations", () => {
    const { dir, manifestPath } = makeValidDataset();
    writeTensor(join(dir, "y.qtns"), [3], Float32Array.from([0, 1, 0]));
    expect(() => validateDataset(manifestPath)).toThrow(/labels/);
    writeTensor(join(dir, "y.qtns"), [4], Float32Array.from([0, 1, 2, 0]));
    expect(() => validateDataset(manifestPath)).toThrow(/outside/);
    writeTensor(join(dir, "y.qtns"), [4], Float32Array.from([0, 1, 0.5, 0]));
    expect(() => validateDataset(manifestPath)).toThrow(/outside/);
  });

  it("catches missing files", () => {
    const { dir, manifestPath } = makeValidDataset();
    rmSync(join(dir, "x.qtns"));
    expect(() => validateDataset(manifestPath)).toThrow(/missing/);
  });
});
