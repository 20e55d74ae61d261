/**
 * Entry point: `dataprep --dataset <id> --out <dir> [--acknowledge-ethics]`.
 *
 * Raw recordings come either from `--raw <dir>` (already on disk) or are
 * fetched into `--cache <dir>` first; fetching requires `--files` with the
 * comma-separated raw file names to retrieve from the dataset's source URL.
 *
 * Exit codes: 0 success, 2 invalid request (unknown dataset, ethics gate,
 * dim mismatch, integrity failure), 3 unexpected runtime failure.
 */

import { parseArgs } from "node:util";
import { convertDataset } from "./convert.js";
import { EthicsError, FormatError, IntegrityError, RecipeError } from "./errors.js";
import { fetchRaw } from "./fetch.js";
import { RECIPES, getRecipe, epochedLength } from "./recipes.js";

function listRecipes(): void {
  const rows = Object.values(RECIPES).map((r) => ({
    id: r.id,
    modality: r.modality,
    dims: `${r.expected.channels}x${epochedLength(r)}`,
    classes: r.expected.classes,
    subjects: r.expected.subjects,
    source: r.sourceUrl,
  }));
  const pad = (s: string, w: number) => s.padEnd(w);
  console.log(
    pad("dataset", 12) + pad("modality", 11) + pad("dims", 9) +
      pad("classes", 8) + pad("subjects", 9) + "source",
  );
  for (const row of rows) {
    console.log(
      pad(row.id, 12) + pad(row.modality, 11) + pad(row.dims, 9) +
        pad(String(row.classes), 8) + pad(String(row.subjects), 9) + row.source,
    );
  }
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        dataset: { type: "string" },
        out: { type: "string" },
        raw: { type: "string" },
        cache: { type: "string", default: "cache" },
        files: { type: "string" },
        "acknowledge-ethics": { type: "boolean", default: false },
        list: { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }

  try {
    if (values.list) {
      listRecipes();
      return 0;
    }
    if (!values.dataset || !values.out) {
      console.error("error: --dataset and --out are required (or --list)");
      return 2;
    }
    const recipe = getRecipe(values.dataset);

    let rawDir = values.raw;
    if (!rawDir) {
      if (!values.files) {
        console.error(
          "error: fetching needs --files <name,name,...> naming the raw " +
            "recordings to download (or pass --raw <dir> for local files)",
        );
        return 2;
      }
      const fetched = await fetchRaw(recipe, {
        cacheDir: values.cache!,
        acknowledgeEthics: values["acknowledge-ethics"],
        files: values.files.split(",").map((f) => f.trim()),
      });
      console.log(
        `fetched ${fetched.files.size} file(s), ${fetched.downloaded} from the network`,
      );
      rawDir = fetched.dir;
    } else if (recipe.requiresEthicsAck && !values["acknowledge-ethics"]) {
      throw new EthicsError(
        `dataset '${recipe.id}' requires acknowledging its ethics statement ` +
          `before reuse (see ${recipe.sourceUrl}); pass --acknowledge-ethics`,
      );
    }

    const report = convertDataset(recipe, rawDir, values.out);
    console.log(
      `wrote ${report.manifestPath}: ${report.trials} trials, ` +
        `${report.subjects} subjects` +
        (report.droppedTrials ? `, ${report.droppedTrials} trial(s) dropped` : ""),
    );
    return 0;
  } catch (err) {
    if (
      err instanceof RecipeError ||
      err instanceof EthicsError ||
      err instanceof IntegrityError ||
      err instanceof FormatError ||
      (err instanceof Error && err.message.startsWith("unknown dataset"))
    ) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`runtime failure: ${err}`);
    return 3;
  }
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isDirectRun) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
