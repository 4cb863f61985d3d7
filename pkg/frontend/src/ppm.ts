/**
 * Binary PPM (P6) decoding for frame display.
 *
 * The service returns one P6 image per frame fetch and accepts uploads as
 * a plain concatenation of P6 images, so decode keeps track of where an
 * image ends to support multi-frame buffers.
 */

export interface DecodedFrame {
  width: number;
  height: number;
  /** RGBA, ready for ImageData / putImageData. */
  rgba: Uint8ClampedArray;
}

export class PpmError extends Error {}

function isSpace(byte: number): boolean {
  // space, \t, \n, \v, \f, \r
  return byte === 32 || (byte >= 9 && byte <= 13);
}

// header tokens are separated by whitespace; '#' starts a comment line
function readToken(data: Uint8Array, pos: number): [string, number] {
  const n = data.length;
  while (pos < n) {
    if (isSpace(data[pos])) {
      pos += 1;
    } else if (data[pos] === 0x23) {
      while (pos < n && data[pos] !== 0x0a) pos += 1;
    } else {
      break;
    }
  }
  const start = pos;
  while (pos < n && !isSpace(data[pos])) pos += 1;
  if (start === pos) {
    throw new PpmError('truncated header');
  }
  return [String.fromCharCode(...data.subarray(start, pos)), pos];
}

function headerInt(text: string, what: string): number {
  if (!/^\d+$/.test(text)) {
    throw new PpmError(`bad ${what} '${text}'`);
  }
  return parseInt(text, 10);
}

/**
 * Decode one P6 image starting at `pos`; returns the frame and the offset
 * just past its pixel data.
 */
export function decodePpmAt(data: Uint8Array, pos = 0): [DecodedFrame, number] {
  let magic: string;
  [magic, pos] = readToken(data, pos);
  if (magic !== 'P6') {
    throw new PpmError(`expected P6, got '${magic}'`);
  }
  let token: string;
  [token, pos] = readToken(data, pos);
  const width = headerInt(token, 'width');
  [token, pos] = readToken(data, pos);
  const height = headerInt(token, 'height');
  [token, pos] = readToken(data, pos);
  const maxval = headerInt(token, 'maxval');
  if (maxval !== 255) {
    throw new PpmError(`unsupported maxval ${maxval}`);
  }
  pos += 1; // single whitespace byte after maxval
  const count = width * height;
  const end = pos + count * 3;
  if (end > data.length) {
    throw new PpmError('truncated pixel data');
  }
  const rgba = new Uint8ClampedArray(count * 4);
  for (let i = 0; i < count; i++) {
    rgba[i * 4] = data[pos + i * 3];
    rgba[i * 4 + 1] = data[pos + i * 3 + 1];
    rgba[i * 4 + 2] = data[pos + i * 3 + 2];
    rgba[i * 4 + 3] = 255;
  }
  return [{ width, height, rgba }, end];
}

export function decodePpm(data: Uint8Array): DecodedFrame {
  const [frame] = decodePpmAt(data, 0);
  return frame;
}

/** Decode a concatenation of P6 images. */
export function decodePpmStream(data: Uint8Array): DecodedFrame[] {
  const frames: DecodedFrame[] = [];
  let pos = 0;
  while (pos < data.length) {
    let frame: DecodedFrame;
    [frame, pos] = decodePpmAt(data, pos);
    frames.push(frame);
  }
  return frames;
}

/** Join per-frame P6 buffers into the upload stream format. */
export function concatFrames(parts: Uint8Array[]): Uint8Array {
  const total = parts.reduce((sum, p) => sum + p.length, 0);
  const out = new Uint8Array(total);
  let pos = 0;
  for (const p of parts) {
    out.set(p, pos);
    pos += p.length;
  }
  return out;
}
