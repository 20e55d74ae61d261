/**
 * Raw recordings -> per-subject QTNS tensors + a dataset manifest.
 *
 * Expected raw layout (produced by fetch or supplied via --raw): one
 * continuous recording per subject named `subject-<k>.<edf|csv|mat>` plus a
 * `subject-<k>.events.csv` with `onset,label` rows marking trial windows.
 * CSV recordings hold one column per channel and one row per sample; MAT
 * recordings hold a numeric matrix named `data` laid out (channels x
 * samples); EDF recordings contribute one channel per signal.
 *
 * Every produced file is re-read through the same binary reader contract
 * the training harness uses, and all dims are checked against the recipe's
 * expected (trials x C x T, K classes, subject count).  Any disagreement is
 * a RecipeError - nothing is padded or silently dropped except trial
 * windows that run past the end of a recording, which are counted and
 * reported.
 */

import { readFileSync, readdirSync, mkdirSync } from "node:fs";
import { join } from "node:path";
import { parseNumericCsv } from "./csvnum.js";
import { parseEdf } from "./edf.js";
import { RecipeError } from "./errors.js";
import {
  epochTrials,
  selectChannels,
  type ContinuousRecording,
  type TrialMarker,
} from "./epochs.js";
import { writeManifest, validateDataset, type ManifestFileEntry } from "./manifest.js";
import { parseMat5 } from "./mat5.js";
import { writeTensor } from "./qtns.js";
import { epochedLength, type DatasetRecipe } from "./recipes.js";

const SUBJECT_FILE = /^subject-(\d+)\.(edf|csv|mat)$/;

export interface ConversionReport {
  manifestPath: string;
  subjects: number;
  trials: number;
  droppedTrials: number;
}

function loadMarkers(path: string): TrialMarker[] {
  const parsed = parseNumericCsv(readFileSync(path, "utf-8"));
  const width = parsed.header ? parsed.header.length : parsed.rows[0]?.length ?? 0;
  if (width !== 2) {
    throw new RecipeError(`${path}: events file must have onset,label columns`);
  }
  return parsed.rows.map((row) => ({ onset: row[0]!, label: row[1]! }));
}

function loadChannels(recipe: DatasetRecipe, path: string): Float64Array[] {
  switch (recipe.rawFormat) {
    case "edf":
      return parseEdf(readFileSync(path)).signals;
    case "csv": {
      const parsed = parseNumericCsv(readFileSync(path, "utf-8"));
      const width = parsed.rows[0]?.length ?? 0;
      const channels = Array.from(
        { length: width },
        () => new Float64Array(parsed.rows.length),
      );
      parsed.rows.forEach((row, s) => {
        row.forEach((value, c) => {
          channels[c]![s] = value;
        });
      });
      return channels;
    }
    case "mat5": {
      const matrices = parseMat5(readFileSync(path));
      const data = matrices.get("data");
      if (!data) {
        throw new RecipeError(`${path}: no matrix named 'data'`);
      }
      const [rows, cols] = [data.dims[0]!, data.dims[1]!];
      return Array.from({ length: rows }, (_, r) =>
        Float64Array.from(data.data.subarray(r * cols, (r + 1) * cols)),
      );
    }
  }
}

export function discoverSubjects(rawDir: string): Map<number, string> {
  const subjects = new Map<number, string>();
  for (const name of readdirSync(rawDir).sort()) {
    const match = SUBJECT_FILE.exec(name);
    if (match) {
      subjects.set(Number(match[1]), join(rawDir, name));
    }
  }
  return subjects;
}

export function convertDataset(
  recipe: DatasetRecipe,
  rawDir: string,
  outDir: string,
): ConversionReport {
  const subjects = discoverSubjects(rawDir);
  if (subjects.size === 0) {
    throw new RecipeError(`no subject-<k>.<ext> recordings found in ${rawDir}`);
  }
  if (subjects.size !== recipe.expected.subjects) {
    throw new RecipeError(
      `${recipe.id}: found ${subjects.size} subjects, expected ` +
        `${recipe.expected.subjects}`,
    );
  }
  mkdirSync(outDir, { recursive: true });

  const files: ManifestFileEntry[] = [];
  let totalTrials = 0;
  let totalDropped = 0;
  for (const [subject, recordingPath] of [...subjects.entries()].sort(
    (a, b) => a[0] - b[0],
  )) {
    const eventsPath = recordingPath.replace(/\.(edf|csv|mat)$/, ".events.csv");
    const recording: ContinuousRecording = {
      channels: selectChannels(
        loadChannels(recipe, recordingPath),
        recipe.channelSelect,
      ),
      markers: loadMarkers(eventsPath),
    };
    if (recording.channels.length !== recipe.expected.channels) {
      throw new RecipeError(
        `${recipe.id} subject ${subject}: ${recording.channels.length} channels ` +
          `after selection, expected ${recipe.expected.channels}`,
      );
    }
    const epoched = epochTrials(recording, recipe.epochSamples, recipe.decimation);
    if (epoched.time !== recipe.expected.time) {
      throw new RecipeError(
        `${recipe.id} subject ${subject}: T=${epoched.time} after decimation, ` +
          `expected ${recipe.expected.time}`,
      );
    }
    if (epoched.labels.length === 0) {
      throw new RecipeError(`${recipe.id} subject ${subject}: no usable trials`);
    }
    totalDropped += epoched.dropped;
    totalTrials += epoched.labels.length;

    const tensorName = `subject-${subject}.data.qtns`;
    const labelsName = `subject-${subject}.labels.qtns`;
    writeTensor(
      join(outDir, tensorName),
      [epoched.labels.length, epoched.channels, epoched.time],
      epoched.data,
    );
    writeTensor(
      join(outDir, labelsName),
      [epoched.labels.length],
      Float32Array.from(epoched.labels),
    );
    files.push({ tensor: tensorName, labels: labelsName, subject });
  }

  const manifestPath = join(outDir, "manifest.json");
  writeManifest(manifestPath, {
    name: recipe.id,
    modality: recipe.modality,
    channels: recipe.expected.channels,
    time: epochedLength(recipe),
    num_classes: recipe.expected.classes,
    subjects: subjects.size,
    files,
    ...(recipe.notes ? { notes: recipe.notes } : {}),
  });

  // validation pass: everything back through the reader contract
  const summary = validateDataset(manifestPath);
  if (summary.trials !== totalTrials || summary.subjects !== recipe.expected.subjects) {
    throw new RecipeError(
      `${recipe.id}: validation re-read disagrees with conversion ` +
        `(${summary.trials}/${totalTrials} trials, ${summary.subjects} subjects)`,
    );
  }
  return {
    manifestPath,
    subjects: subjects.size,
    trials: totalTrials,
    droppedTrials: totalDropped,
  };
}
