/**
 * Cached raw-file retrieval with checksum records.
 *
 * Layout: <cacheDir>/<dataset>/<file> plus a checksums.json mapping file
 * name to sha256.  A warm cache makes zero network calls but is still
 * verified against the recorded checksums; a mismatch is an integrity
 * failure, never silently refetched.  Writes are atomic
 * (write-temp-then-rename) so parallel recipe runs cannot interleave.
 */

import { createHash } from "node:crypto";
import {
  existsSync,
  mkdirSync,
  readFileSync,
  renameSync,
  writeFileSync,
} from "node:fs";
import { join } from "node:path";
import { EthicsError, IntegrityError } from "./errors.js";
import type { DatasetRecipe } from "./recipes.js";

export type Transport = (url: string) => Promise<Uint8Array>;

export interface FetchOptions {
  cacheDir: string;
  acknowledgeEthics?: boolean;
  transport?: Transport;
  /** raw file names to retrieve, resolved against the recipe's source URL */
  files: string[];
}

export interface FetchedRaw {
  dir: string;
  /** file name -> absolute cached path */
  files: Map<string, string>;
  /** how many files actually hit the network this run */
  downloaded: number;
}

const defaultTransport: Transport = async (url) => {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`HTTP ${response.status} for ${url}`);
  }
  return new Uint8Array(await response.arrayBuffer());
};

export function sha256Hex(data: Uint8Array): string {
  return createHash("sha256").update(data).digest("hex");
}

function loadChecksums(path: string): Record<string, string> {
  if (!existsSync(path)) return {};
  return JSON.parse(readFileSync(path, "utf-8")) as Record<string, string>;
}

function saveChecksums(path: string, sums: Record<string, string>): void {
  const tmp = `${path}.tmp-${process.pid}`;
  writeFileSync(tmp, JSON.stringify(sums, null, 2) + "\n");
  renameSync(tmp, path);
}

export async function fetchRaw(
  recipe: DatasetRecipe,
  options: FetchOptions,
): Promise<FetchedRaw> {
  if (recipe.requiresEthicsAck && !options.acknowledgeEthics) {
    throw new EthicsError(
      `dataset '${recipe.id}' requires acknowledging its ethics statement ` +
        `before reuse (see ${recipe.sourceUrl}); pass --acknowledge-ethics ` +
        `once you have read it`,
    );
  }
  const transport = options.transport ?? defaultTransport;
  const dir = join(options.cacheDir, recipe.id);
  mkdirSync(dir, { recursive: true });
  const checksumPath = join(dir, "checksums.json");
  const sums = loadChecksums(checksumPath);

  const files = new Map<string, string>();
  let downloaded = 0;
  for (const name of options.files) {
    const target = join(dir, name);
    const recorded = sums[name];
    if (existsSync(target)) {
      const digest = sha256Hex(readFileSync(target));
      if (recorded !== undefined && digest !== recorded) {
        throw new IntegrityError(
          `${recipe.id}/${name}: cached file checksum ${digest.slice(0, 12)}… ` +
            `does not match the recorded ${recorded.slice(0, 12)}…`,
        );
      }
      if (recorded === undefined) {
        sums[name] = digest;
      }
      files.set(name, target);
      continue;
    }
    const url = recipe.sourceUrl.replace(/\/$/, "") + "/" + name;
    const bytes = await transport(url);
    const digest = sha256Hex(bytes);
    if (recorded !== undefined && digest !== recorded) {
      throw new IntegrityError(
        `${recipe.id}/${name}: downloaded checksum ${digest.slice(0, 12)}… ` +
          `does not match the recorded ${recorded.slice(0, 12)}…`,
      );
    }
    const tmp = `${target}.tmp-${process.pid}`;
    writeFileSync(tmp, bytes);
    renameSync(tmp, target);
    sums[name] = digest;
    downloaded += 1;
    files.set(name, target);
  }
  saveChecksums(checksumPath, sums);
  return { dir, files, downloaded };
}
