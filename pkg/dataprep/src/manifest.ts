/**
 * Dataset manifest: the JSON contract between this converter and the
 * training harness.  Keys and layout must match the harness loader exactly.
 */

import { readFileSync, writeFileSync, renameSync, existsSync } from "node:fs";
import { dirname, join } from "node:path";
import { FormatError, RecipeError } from "./errors.js";
import { readTensor } from "./qtns.js";

export interface ManifestFileEntry {
  tensor: string;
  labels: string;
  subject: number;
}

export interface DatasetManifest {
  name: string;
  modality: string;
  channels: number;
  time: number;
  num_classes: number;
  subjects: number;
  files: ManifestFileEntry[];
  notes?: string[];
}

export function writeManifest(path: string, manifest: DatasetManifest): void {
  const tmp = `${path}.tmp-${process.pid}`;
  writeFileSync(tmp, JSON.stringify(manifest, null, 2) + "\n");
  renameSync(tmp, path);
}

export function readManifest(path: string): DatasetManifest {
  const doc = JSON.parse(readFileSync(path, "utf-8")) as DatasetManifest;
  for (const key of ["name", "modality", "channels", "time", "num_classes", "subjects", "files"]) {
    if (!(key in doc)) {
      throw new FormatError(`manifest missing key ${key}`);
    }
  }
  return doc;
}

export interface ValidationSummary {
  trials: number;
  subjects: number;
}

/**
 * Re-read every referenced tensor through the same binary reader contract
 * the training harness uses, checking dims and label ranges.
 */
export function validateDataset(manifestPath: string): ValidationSummary {
  const manifest = readManifest(manifestPath);
  const base = dirname(manifestPath);
  let trials = 0;
  const subjects = new Set<number>();
  for (const entry of manifest.files) {
    const tensorPath = join(base, entry.tensor);
    const labelsPath = join(base, entry.labels);
    if (!existsSync(tensorPath) || !existsSync(labelsPath)) {
      throw new RecipeError(`missing file for subject ${entry.subject}`);
    }
    const tensor = readTensor(tensorPath);
    if (
      tensor.dims.length !== 3 ||
      tensor.dims[1] !== manifest.channels ||
      tensor.dims[2] !== manifest.time
    ) {
      throw new RecipeError(
        `${entry.tensor}: dims ${JSON.stringify(tensor.dims)} disagree with ` +
          `manifest (trials, ${manifest.channels}, ${manifest.time})`,
      );
    }
    const labels = readTensor(labelsPath);
    if (labels.dims.length !== 1 || labels.dims[0] !== tensor.dims[0]) {
      throw new RecipeError(
        `${entry.labels}: expected ${tensor.dims[0]} labels, got ` +
          JSON.stringify(labels.dims),
      );
    }
    for (const value of labels.data) {
      if (!Number.isInteger(value) || value < 0 || value >= manifest.num_classes) {
        throw new RecipeError(
          `${entry.labels}: label ${value} outside [0, ${manifest.num_classes})`,
        );
      }
    }
    trials += tensor.dims[0]!;
    subjects.add(entry.subject);
  }
  return { trials, subjects: subjects.size };
}
