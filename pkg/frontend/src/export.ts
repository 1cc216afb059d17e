import * as fs from "fs";
import * as path from "path";
import * as tf from "@tensorflow/tfjs";

import { loadSaliencyModel, modelInputSize } from "./model";
import { encodePgm } from "./pgm";
import { readPng } from "./png";

export interface ExportJob {
  frameDir: string;
  outDir: string;
  modelDir: string;
  batchSize: number;
}

export interface ExportResult {
  written: number;
  skipped: number;
  /** model's native spatial input size, [height, width] */
  inputSize: [number, number];
}

const METADATA_FILE = "saliency_meta.json";

function listFrames(frameDir: string): string[] {
  return fs
    .readdirSync(frameDir)
    .filter((name) => name.toLowerCase().endsWith(".png"))
    .sort();
}

function outName(frameName: string): string {
  return frameName.replace(/\.png$/i, ".pgm");
}

/** Min-max normalize to [0,1]; a constant map becomes all zeros. */
function normalize(values: Float32Array): Float32Array {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const out = new Float32Array(values.length);
  if (hi - lo > 0) {
    for (let i = 0; i < values.length; i++) out[i] = (values[i] - lo) / (hi - lo);
  }
  return out;
}

function quantize(values: Float32Array): Uint8Array {
  const out = new Uint8Array(values.length);
  for (let i = 0; i < values.length; i++) out[i] = Math.round(values[i] * 255);
  return out;
}

/**
 * Run the saliency model over every PNG frame and write one PGM map per
 * frame, resized back to the frame's own dimensions and min-max normalized
 * before 8-bit quantization. Frames whose map already exists are skipped,
 * so interrupted runs resume and reruns write nothing.
 */
export async function exportSaliency(job: ExportJob): Promise<ExportResult> {
  if (!fs.existsSync(job.frameDir) || !fs.statSync(job.frameDir).isDirectory()) {
    throw new Error(`frame directory does not exist: ${job.frameDir}`);
  }
  if (job.batchSize < 1) {
    throw new Error(`batch size must be >= 1, got ${job.batchSize}`);
  }
  const model = await loadSaliencyModel(job.modelDir);
  const [inH, inW] = modelInputSize(model);

  fs.mkdirSync(job.outDir, { recursive: true });
  const frames = listFrames(job.frameDir);
  const pending = frames.filter(
    (name) => !fs.existsSync(path.join(job.outDir, outName(name))),
  );
  const skipped = frames.length - pending.length;

  let written = 0;
  for (let start = 0; start < pending.length; start += job.batchSize) {
    const batchNames = pending.slice(start, start + job.batchSize);
    const images = batchNames.map((name) => readPng(path.join(job.frameDir, name)));

    const maps = tf.tidy(() => {
      const tensors = images.map((img) =>
        tf.tensor3d(img.rgb, [img.height, img.width, 3], "float32").div(255),
      );
      const resized = tensors.map((t) =>
        tf.image.resizeBilinear(t as tf.Tensor3D, [inH, inW]),
      );
      const batch = tf.stack(resized) as tf.Tensor4D;
      let raw = model.predict(batch) as tf.Tensor;
      if (raw.rank === 3) {
        raw = raw.expandDims(-1); // [b, h, w] -> [b, h, w, 1]
      }
      const [, outH, outW] = raw.shape as [number, number, number, number];
      // resize each map back to its frame's own dimensions
      return images.map((img, i) => {
        const map = raw.slice([i, 0, 0, 0], [1, outH, outW, 1]) as tf.Tensor4D;
        const back = tf.image.resizeBilinear(map, [img.height, img.width]);
        return back.reshape([img.height, img.width]);
      });
    });

    for (let i = 0; i < batchNames.length; i++) {
      const img = images[i];
      const data = maps[i].dataSync() as Float32Array;
      maps[i].dispose();
      const pixels = quantize(normalize(data));
      const target = path.join(job.outDir, outName(batchNames[i]));
      fs.writeFileSync(
        target,
        encodePgm({ width: img.width, height: img.height, pixels }),
      );
      written++;
    }
  }

  const metadata = {
    schema_version: 1,
    model_input_height: inH,
    model_input_width: inW,
    frames_total: frames.length,
    normalization: "per-map min-max before 8-bit quantization",
  };
  fs.writeFileSync(
    path.join(job.outDir, METADATA_FILE),
    JSON.stringify(metadata, null, 2) + "\n",
  );
  model.dispose();
  return { written, skipped, inputSize: [inH, inW] };
}
