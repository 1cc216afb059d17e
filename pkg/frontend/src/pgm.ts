/**
 * Binary PGM (P5, maxval 255) reading and writing. This is the interchange
 * format the summarizer loads saliency maps from: one byte per pixel,
 * row-major.
 */

export interface GrayImage {
  width: number;
  height: number;
  /** row-major, length width*height */
  pixels: Uint8Array;
}

export function encodePgm(image: GrayImage): Buffer {
  const { width, height, pixels } = image;
  if (pixels.length !== width * height) {
    throw new Error(`pixel buffer is ${pixels.length} bytes, expected ${width * height}`);
  }
  const header = Buffer.from(`P5\n${width} ${height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(pixels)]);
}

export function decodePgm(data: Buffer): GrayImage {
  // header: magic, width, height, maxval, separated by whitespace; comments allowed
  let pos = 0;
  const tokens: string[] = [];
  while (tokens.length < 4 && pos < data.length) {
    while (pos < data.length && /\s/.test(String.fromCharCode(data[pos]))) pos++;
    if (data[pos] === 0x23) {
      // '#' comment runs to end of line
      while (pos < data.length && data[pos] !== 0x0a) pos++;
      continue;
    }
    let token = "";
    while (pos < data.length && !/\s/.test(String.fromCharCode(data[pos]))) {
      token += String.fromCharCode(data[pos]);
      pos++;
    }
    if (token) tokens.push(token);
  }
  if (tokens[0] !== "P5") throw new Error(`not a binary PGM (magic ${tokens[0]})`);
  const [width, height, maxval] = tokens.slice(1).map(Number);
  if (maxval !== 255) throw new Error(`unsupported maxval ${maxval}`);
  pos++; // single whitespace after maxval
  const pixels = new Uint8Array(data.subarray(pos, pos + width * height));
  if (pixels.length !== width * height) {
    throw new Error(`truncated PGM: ${pixels.length} of ${width * height} bytes`);
  }
  return { width, height, pixels };
}
