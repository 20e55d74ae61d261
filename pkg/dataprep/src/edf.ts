/**
 * Minimal EDF (European Data Format) reader: fixed 256-byte ASCII header,
 * one 256-byte ASCII block per signal, then data records of 16-bit
 * little-endian samples scaled from digital to physical units.
 */

import { FormatError } from "./errors.js";

export interface EdfSignalHeader {
  label: string;
  physicalDimension: string;
  physicalMin: number;
  physicalMax: number;
  digitalMin: number;
  digitalMax: number;
  samplesPerRecord: number;
}

export interface EdfHeader {
  version: string;
  patientId: string;
  recordingId: string;
  headerBytes: number;
  dataRecords: number;
  recordDurationSec: number;
  signalCount: number;
  signals: EdfSignalHeader[];
}

export interface EdfRecording {
  header: EdfHeader;
  /** one continuous Float64Array per signal, physical units */
  signals: Float64Array[];
}

const ascii = new TextDecoder("ascii");

function field(buffer: Uint8Array, start: number, length: number): string {
  return ascii.decode(buffer.subarray(start, start + length)).trim();
}

export function parseEdf(buffer: Uint8Array): EdfRecording {
  if (buffer.length < 256) {
    throw new FormatError("EDF: file shorter than the fixed header");
  }
  const signalCount = parseInt(field(buffer, 252, 4), 10);
  if (!Number.isFinite(signalCount) || signalCount < 1) {
    throw new FormatError("EDF: bad signal count");
  }
  const headerBytes = parseInt(field(buffer, 184, 8), 10);
  if (headerBytes !== 256 * (1 + signalCount)) {
    throw new FormatError(
      `EDF: header declares ${headerBytes} bytes, expected ${256 * (1 + signalCount)}`,
    );
  }
  const dataRecords = parseInt(field(buffer, 236, 8), 10);
  const recordDurationSec = parseFloat(field(buffer, 244, 8));

  // per-signal header: fields are stored column-wise, 256 bytes per signal
  const sigBase = 256;
  const col = (offset: number, width: number, index: number) =>
    field(buffer, sigBase + offset * signalCount + width * index, width);
  const signals: EdfSignalHeader[] = [];
  for (let i = 0; i < signalCount; i++) {
    signals.push({
      label: col(0, 16, i),
      physicalDimension: field(
        buffer,
        sigBase + (16 + 80) * signalCount + 8 * i,
        8,
      ),
      physicalMin: parseFloat(
        field(buffer, sigBase + (16 + 80 + 8) * signalCount + 8 * i, 8),
      ),
      physicalMax: parseFloat(
        field(buffer, sigBase + (16 + 80 + 8 + 8) * signalCount + 8 * i, 8),
      ),
      digitalMin: parseInt(
        field(buffer, sigBase + (16 + 80 + 8 + 8 + 8) * signalCount + 8 * i, 8),
        10,
      ),
      digitalMax: parseInt(
        field(buffer, sigBase + (16 + 80 + 8 + 8 + 8 + 8) * signalCount + 8 * i, 8),
        10,
      ),
      samplesPerRecord: parseInt(
        field(
          buffer,
          sigBase + (16 + 80 + 8 + 8 + 8 + 8 + 8 + 80) * signalCount + 8 * i,
          8,
        ),
        10,
      ),
    });
  }

  const header: EdfHeader = {
    version: field(buffer, 0, 8),
    patientId: field(buffer, 8, 80),
    recordingId: field(buffer, 88, 80),
    headerBytes,
    dataRecords,
    recordDurationSec,
    signalCount,
    signals,
  };

  const recordSamples = signals.reduce((sum, s) => sum + s.samplesPerRecord, 0);
  const expected = headerBytes + dataRecords * recordSamples * 2;
  if (buffer.length < expected) {
    throw new FormatError(
      `EDF: need ${expected} bytes for ${dataRecords} records, have ${buffer.length}`,
    );
  }

  const view = new DataView(buffer.buffer, buffer.byteOffset, buffer.byteLength);
  const out = signals.map(
    (s) => new Float64Array(s.samplesPerRecord * dataRecords),
  );
  let offset = headerBytes;
  for (let rec = 0; rec < dataRecords; rec++) {
    for (let sig = 0; sig < signalCount; sig++) {
      const s = signals[sig]!;
      const gain =
        (s.physicalMax - s.physicalMin) / (s.digitalMax - s.digitalMin || 1);
      const target = out[sig]!;
      let pos = rec * s.samplesPerRecord;
      for (let j = 0; j < s.samplesPerRecord; j++) {
        const raw = view.getInt16(offset, true);
        target[pos++] = s.physicalMin + (raw - s.digitalMin) * gain;
        offset += 2;
      }
    }
  }
  return { header, signals: out };
}
