/**
 * Turning continuous multichannel recordings into fixed-length trials:
 * channel selection, onset-based windowing, and decimation.
 */

import { RecipeError } from "./errors.js";

export interface TrialMarker {
  /** sample index where the trial window starts */
  onset: number;
  label: number;
}

export interface ContinuousRecording {
  /** one Float64Array per channel, equal lengths */
  channels: Float64Array[];
  markers: TrialMarker[];
}

export interface EpochedTrials {
  /** row-major (trials, channels, time) */
  data: Float32Array;
  labels: number[];
  channels: number;
  time: number;
  /** markers whose window ran past the end of the recording */
  dropped: number;
}

export function selectChannels(
  channels: Float64Array[],
  selection: { first: number } | null,
): Float64Array[] {
  if (selection === null) {
    return channels;
  }
  if (channels.length < selection.first) {
    throw new RecipeError(
      `need the first ${selection.first} channels, recording has ${channels.length}`,
    );
  }
  return channels.slice(0, selection.first);
}

/** Keep every `factor`-th sample of a window, starting at its first sample. */
export function decimate(window: Float64Array, factor: number): Float64Array {
  if (factor === 1) {
    return window;
  }
  const out = new Float64Array(Math.floor(window.length / factor));
  for (let i = 0; i < out.length; i++) {
    out[i] = window[i * factor]!;
  }
  return out;
}

export function epochTrials(
  recording: ContinuousRecording,
  epochSamples: number,
  decimation: number,
): EpochedTrials {
  const channels = recording.channels.length;
  if (channels === 0) {
    throw new RecipeError("recording has no channels");
  }
  const length = recording.channels[0]!.length;
  for (const channel of recording.channels) {
    if (channel.length !== length) {
      throw new RecipeError("channels have unequal lengths");
    }
  }
  const time = Math.floor(epochSamples / decimation);
  if (time < 1) {
    throw new RecipeError(
      `epoch of ${epochSamples} samples vanishes under decimation ${decimation}`,
    );
  }
  const usable = recording.markers.filter((m) => m.onset + epochSamples <= length);
  const dropped = recording.markers.length - usable.length;
  const data = new Float32Array(usable.length * channels * time);
  const labels: number[] = [];
  usable.forEach((marker, t) => {
    labels.push(marker.label);
    for (let c = 0; c < channels; c++) {
      const window = recording.channels[c]!.subarray(
        marker.onset,
        marker.onset + epochSamples,
      );
      const sampled = decimate(window, decimation);
      data.set(
        Float32Array.from(sampled),
        t * channels * time + c * time,
      );
    }
  });
  return { data, labels, channels, time, dropped };
}
