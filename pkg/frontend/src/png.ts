import * as fs from "fs";
import { PNG } from "pngjs";

export interface RgbImage {
  width: number;
  height: number;
  /** row-major RGB triples, length width*height*3 */
  rgb: Uint8Array;
}

export class DecodeError extends Error {}

export function readPng(path: string): RgbImage {
  let png: PNG;
  try {
    png = PNG.sync.read(fs.readFileSync(path));
  } catch (err) {
    throw new DecodeError(`cannot decode image ${path}: ${(err as Error).message}`);
  }
  const n = png.width * png.height;
  const rgb = new Uint8Array(n * 3);
  for (let i = 0; i < n; i++) {
    rgb[i * 3] = png.data[i * 4];
    rgb[i * 3 + 1] = png.data[i * 4 + 1];
    rgb[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { width: png.width, height: png.height, rgb };
}

export function writePng(path: string, image: RgbImage): void {
  const png = new PNG({ width: image.width, height: image.height });
  const n = image.width * image.height;
  for (let i = 0; i < n; i++) {
    png.data[i * 4] = image.rgb[i * 3];
    png.data[i * 4 + 1] = image.rgb[i * 3 + 1];
    png.data[i * 4 + 2] = image.rgb[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}
