/**
 * One recipe per supported public dataset: where to fetch it, how to parse
 * the raw files, how to epoch them, and the exact output dims the converter
 * must produce.  A conversion whose output disagrees with `expected` fails
 * loudly rather than padding or truncating.
 *
 * Raw-layout caveat: the archives' exact server-side structure cannot be
 * pinned down without downloading them, so each recipe declares the raw
 * format its converter consumes (see convert.ts for the per-subject file
 * naming).  Dims, channel counts, epoch windows, and decimation factors
 * come from the datasets' published descriptions.
 */

export type DatasetId =
  | "stress"
  | "rsvp"
  | "mi"
  | "errp"
  | "faces-basic"
  | "faces-noisy"
  | "asl";

export type RawFormat = "edf" | "csv" | "mat5";

export interface ExpectedDims {
  channels: number;
  time: number;
  classes: number;
  subjects: number;
}

export interface DatasetRecipe {
  id: DatasetId;
  modality: string;
  sourceUrl: string;
  rawFormat: RawFormat;
  /** null = take all channels; {first: n} = first n in recording order. */
  channelSelect: { first: number } | null;
  /** raw samples per trial window, before decimation */
  epochSamples: number;
  /** keep every k-th sample */
  decimation: number;
  sampleRateHz: number;
  expected: ExpectedDims;
  requiresEthicsAck?: boolean;
  notes?: string[];
}

export const RECIPES: Record<DatasetId, DatasetRecipe> = {
  stress: {
    id: "stress",
    modality: "multimodal",
    sourceUrl: "https://physionet.org/content/noneeg/1.0.0/",
    rawFormat: "csv",
    channelSelect: null,
    epochSamples: 1,
    decimation: 1,
    sampleRateHz: 1,
    expected: { channels: 7, time: 1, classes: 4, subjects: 20 },
    notes: [
      "per-timestep samples (T=1); the source description mentions 5-minute tasks (300 samples at 1 Hz), which would be T=300 per task - the published dimension table says 7x1 and wins",
    ],
  },
  rsvp: {
    id: "rsvp",
    modality: "eeg",
    sourceUrl: "http://hdl.handle.net/2047/D20294523",
    rawFormat: "csv",
    channelSelect: null,
    epochSamples: 128,
    decimation: 1,
    sampleRateHz: 256,
    expected: { channels: 16, time: 128, classes: 4, subjects: 10 },
  },
  mi: {
    id: "mi",
    modality: "eeg",
    sourceUrl: "https://physionet.org/physiobank/database/eegmmidb/",
    rawFormat: "edf",
    channelSelect: null,
    epochSamples: 480, // 3 s post-cue at 160 Hz
    decimation: 1,
    sampleRateHz: 160,
    expected: { channels: 64, time: 480, classes: 4, subjects: 106 },
    notes: ["subjects with irregular timestamps are excluded upstream (109 -> 106)"],
  },
  errp: {
    id: "errp",
    modality: "eeg",
    sourceUrl: "https://www.kaggle.com/c/inria-bci-challenge/",
    rawFormat: "csv",
    channelSelect: null,
    epochSamples: 250, // 1.25 s at 200 Hz
    decimation: 1,
    sampleRateHz: 200,
    expected: { channels: 56, time: 250, classes: 2, subjects: 27 },
    notes: [
      "the experiment description mentions 16 subjects; the published dimension table says 27 and wins",
    ],
  },
  "faces-basic": {
    id: "faces-basic",
    modality: "ecog",
    sourceUrl: "https://exhibits.stanford.edu/data/catalog/zk881ps0522",
    rawFormat: "mat5",
    channelSelect: { first: 31 },
    epochSamples: 400, // 400 ms at 1000 Hz
    decimation: 1,
    sampleRateHz: 1000,
    expected: { channels: 31, time: 400, classes: 2, subjects: 14 },
    notes: ["channel grids differ per patient; the first 31 by recording order are used"],
  },
  "faces-noisy": {
    id: "faces-noisy",
    modality: "ecog",
    sourceUrl: "https://exhibits.stanford.edu/data/catalog/zk881ps0522",
    rawFormat: "mat5",
    channelSelect: { first: 39 },
    epochSamples: 400,
    decimation: 1,
    sampleRateHz: 1000,
    expected: { channels: 39, time: 400, classes: 2, subjects: 7 },
    requiresEthicsAck: true,
    notes: ["scrambled-image variant; reuse requires acknowledging the dataset's ethics statement"],
  },
  asl: {
    id: "asl",
    modality: "emg",
    sourceUrl: "http://hdl.handle.net/2047/D20294523",
    rawFormat: "csv",
    channelSelect: null,
    epochSamples: 12000, // 6 s hold at 2 kHz
    decimation: 240, // 12000 / 240 = 50 samples per trial
    sampleRateHz: 2000,
    expected: { channels: 16, time: 50, classes: 33, subjects: 5 },
  },
};

export function getRecipe(id: string): DatasetRecipe {
  const recipe = (RECIPES as Record<string, DatasetRecipe>)[id];
  if (!recipe) {
    const known = Object.keys(RECIPES).join(", ");
    throw new Error(`unknown dataset '${id}' (known: ${known})`);
  }
  return recipe;
}

/** T produced by a recipe's epoch window and decimation. */
export function epochedLength(recipe: DatasetRecipe): number {
  return Math.floor(recipe.epochSamples / recipe.decimation);
}
