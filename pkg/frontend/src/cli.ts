#!/usr/bin/env node
/**
 * export-saliency --frames DIR --out DIR [--batch 8] [--model DIR]
 *
 * Writes one 8-bit grayscale PGM saliency map per PNG frame, in the
 * interchange format the summarizer's ingestion reads. Existing maps are
 * skipped, so the command is resumable and idempotent.
 */

import { exportSaliency } from "./export";
import { MissingWeights } from "./model";
import { DecodeError } from "./png";

interface CliArgs {
  frames: string;
  out: string;
  model: string;
  batch: number;
}

function parseArgs(argv: string[]): CliArgs {
  const args: Partial<CliArgs> = {
    model: process.env.SALIENCY_MODEL_DIR ?? "model",
    batch: 8,
  };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--frames":
        args.frames = value;
        i++;
        break;
      case "--out":
        args.out = value;
        i++;
        break;
      case "--model":
        args.model = value;
        i++;
        break;
      case "--batch":
        args.batch = Number(value);
        i++;
        break;
      case "--help":
      case "-h":
        console.log(
          "usage: export-saliency --frames DIR --out DIR [--batch 8] [--model DIR]",
        );
        process.exit(0);
        break;
      default:
        console.error(`unknown flag: ${flag}`);
        process.exit(2);
    }
  }
  if (!args.frames || !args.out) {
    console.error("error: --frames and --out are required (see --help)");
    process.exit(2);
  }
  if (!Number.isFinite(args.batch) || (args.batch as number) < 1) {
    console.error(`error: --batch must be a positive integer`);
    process.exit(2);
  }
  return args as CliArgs;
}

async function main(): Promise<void> {
  const args = parseArgs(process.argv.slice(2));
  try {
    const result = await exportSaliency({
      frameDir: args.frames,
      outDir: args.out,
      modelDir: args.model,
      batchSize: args.batch,
    });
    console.log(
      `wrote ${result.written} maps (${result.skipped} already present), ` +
        `model input ${result.inputSize[1]}x${result.inputSize[0]}`,
    );
  } catch (err) {
    if (err instanceof MissingWeights || err instanceof DecodeError) {
      console.error(`error: ${err.constructor.name}: ${err.message}`);
      process.exit(1);
    }
    throw err;
  }
}

main();
