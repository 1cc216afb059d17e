import * as fs from "fs";
import * as path from "path";
import * as tf from "@tensorflow/tfjs";

/** Raised when the model directory or its weight files are absent/unreadable. */
export class MissingWeights extends Error {}

function diskLoadHandler(dir: string): tf.io.IOHandler {
  return {
    load: async () => {
      const modelJson = JSON.parse(
        fs.readFileSync(path.join(dir, "model.json"), "utf8"),
      );
      const weightSpecs: tf.io.WeightsManifestEntry[] = [];
      const buffers: Buffer[] = [];
      for (const group of modelJson.weightsManifest ?? []) {
        weightSpecs.push(...group.weights);
        for (const rel of group.paths) {
          const weightPath = path.join(dir, rel);
          if (!fs.existsSync(weightPath)) {
            throw new MissingWeights(`weight shard missing: ${weightPath}`);
          }
          buffers.push(fs.readFileSync(weightPath));
        }
      }
      const concat = Buffer.concat(buffers);
      const weightData = concat.buffer.slice(
        concat.byteOffset,
        concat.byteOffset + concat.byteLength,
      );
      return {
        modelTopology: modelJson.modelTopology,
        format: modelJson.format,
        generatedBy: modelJson.generatedBy,
        convertedBy: modelJson.convertedBy,
        weightSpecs,
        weightData,
      };
    },
  };
}

/**
 * Load a layers-format saliency model (model.json + weight shards) from disk.
 * The model must map [batch, h, w, 3] RGB in [0,1] to a single-channel map.
 */
export async function loadSaliencyModel(dir: string): Promise<tf.LayersModel> {
  if (!fs.existsSync(path.join(dir, "model.json"))) {
    throw new MissingWeights(
      `no model.json in ${dir}; download or convert the pretrained weights first (see README)`,
    );
  }
  try {
    return await tf.loadLayersModel(diskLoadHandler(dir));
  } catch (err) {
    if (err instanceof MissingWeights) throw err;
    throw new MissingWeights(`cannot load model from ${dir}: ${(err as Error).message}`);
  }
}

/** Spatial input size of the model as [height, width]. */
export function modelInputSize(model: tf.LayersModel): [number, number] {
  const shape = model.inputs[0].shape; // [null, h, w, c]
  const h = shape[1];
  const w = shape[2];
  if (!h || !w) {
    throw new MissingWeights(`model has no fixed spatial input size (shape ${shape})`);
  }
  return [h, w];
}

/** Save a layers model as model.json + weights.bin (the layout the loader reads). */
export async function saveModelToDir(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const manifest = [
        {
          paths: ["weights.bin"],
          weights: artifacts.weightSpecs,
        },
      ];
      fs.writeFileSync(
        path.join(dir, "model.json"),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          format: artifacts.format,
          generatedBy: artifacts.generatedBy,
          convertedBy: artifacts.convertedBy,
          weightsManifest: manifest,
        }),
      );
      fs.writeFileSync(
        path.join(dir, "weights.bin"),
        Buffer.from(artifacts.weightData as ArrayBuffer),
      );
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: "JSON" as const,
        },
      };
    }),
  );
}
