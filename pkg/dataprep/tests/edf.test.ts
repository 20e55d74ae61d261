import { describe, expect, it } from "vitest";

import { parseEdf } from "../src/edf.js";
import { FormatError } from "../src/errors.js";

interface TestSignal {
  label: string;
  physMin: number;
  physMax: number;
  digMin: number;
  digMax: number;
  samplesPerRecord: number;
  /** digital samples, length = samplesPerRecord * records */
  digital: number[];
}

/** Assemble a syntactically valid EDF byte buffer. */
export function buildEdf(signals: TestSignal[], records: number): Buffer {
  const ns = signals.length;
  const headerBytes = 256 * (1 + ns);
  const sampleCount = signals.reduce((sum, s) => sum + s.samplesPerRecord, 0);
  const buffer = Buffer.alloc(headerBytes + records * sampleCount * 2, 0x20);

  const put = (text: string, offset: number, width: number) =>
    buffer.write(text.slice(0, width).padEnd(width), offset, "ascii");

  put("0", 0, 8);
  put("test patient", 8, 80);
  put("test recording", 88, 80);
  put("01.01.00", 168, 8);
  put("00.00.00", 176, 8);
  put(String(headerBytes), 184, 8);
  put("", 192, 44);
  put(String(records), 236, 8);
  put("1", 244, 8);
  put(String(ns), 252, 4);

  let offset = 256;
  const block = (width: number, value: (s: TestSignal) => string) => {
    signals.forEach((s, i) => put(value(s), offset + width * i, width));
    offset += width * ns;
  };
  block(16, (s) => s.label);
  block(80, () => "transducer");
  block(8, () => "uV");
  block(8, (s) => String(s.physMin));
  block(8, (s) => String(s.physMax));
  block(8, (s) => String(s.digMin));
  block(8, (s) => String(s.digMax));
  block(80, () => "");
  block(8, (s) => String(s.samplesPerRecord));
  block(32, () => "");

  let pos = headerBytes;
  for (let rec = 0; rec < records; rec++) {
    for (const s of signals) {
      for (let j = 0; j < s.samplesPerRecord; j++) {
        buffer.writeInt16LE(s.digital[rec * s.samplesPerRecord + j]!, pos);
        pos += 2;
      }
    }
  }
  return buffer;
}

describe("EDF parser", () => {
  it("parses header fields and applies physical scaling", () => {
    const signals: TestSignal[] = [
      {
        label: "C3",
        physMin: -100,
        physMax: 100,
        digMin: -32768,
        digMax: 32767,
        samplesPerRecord: 4,
        digital: [0, 16384, -16384, 32767, 1, 2, 3, 4],
      },
      {
        label: "C4",
        physMin: 0,
        physMax: 10,
        digMin: 0,
        digMax: 1000,
        samplesPerRecord: 2,
        digital: [0, 500, 1000, 250],
      },
    ];
    const recording = parseEdf(buildEdf(signals, 2));

    expect(recording.header.signalCount).toBe(2);
    expect(recording.header.dataRecords).toBe(2);
    expect(recording.header.signals[0]!.label).toBe("C3");
    expect(recording.header.signals[1]!.samplesPerRecord).toBe(2);

    // records are concatenated per channel
    expect(recording.signals[0]).toHaveLength(8);
    expect(recording.signals[1]).toHaveLength(4);

    // physical = physMin + (raw - digMin) * (physMax - physMin)/(digMax - digMin)
    const c3 = recording.signals[0]!;
    expect(c3[0]).toBeCloseTo(-100 + (0 + 32768) * (200 / 65535), 6);
    expect(c3[3]).toBeCloseTo(100, 6);
    const c4 = recording.signals[1]!;
    expect(c4[1]).toBeCloseTo(5, 9);
    expect(c4[2]).toBeCloseTo(10, 9);
  });

  it("rejects truncated files", () => {
    const whole = buildEdf(
      [
        {
          label: "x",
          physMin: 0,
          physMax: 1,
          digMin: 0,
          digMax: 100,
          samplesPerRecord: 3,
          digital: [1, 2, 3],
        },
      ],
      1,
    );
    expect(() => parseEdf(whole.subarray(0, whole.length - 2))).toThrow(FormatError);
    expect(() => parseEdf(whole.subarray(0, 100))).toThrow(FormatError);
  });

  it("rejects inconsistent header byte counts", () => {
    const whole = buildEdf(
      [
        {
          label: "x",
          physMin: 0,
          physMax: 1,
          digMin: 0,
          digMax: 100,
          samplesPerRecord: 1,
          digital: [7],
        },
      ],
      1,
    );
    whole.write("9999    ", 184, "ascii");
    expect(() => parseEdf(whole)).toThrow(/header declares/);
  });
});
