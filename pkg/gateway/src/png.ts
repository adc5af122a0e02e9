import { PNG } from 'pngjs';

export interface RgbImage {
  width: number;
  height: number;
  /** Row-major RGB, 8 bits per channel. */
  pixels: Buffer;
}

export function decodePng(data: Buffer): RgbImage {
  const png = PNG.sync.read(data);
  const pixels = Buffer.alloc(png.width * png.height * 3);
  // pngjs always exposes RGBA; drop the alpha channel.
  for (let i = 0, j = 0; i < png.data.length; i += 4, j += 3) {
    pixels[j] = png.data[i];
    pixels[j + 1] = png.data[i + 1];
    pixels[j + 2] = png.data[i + 2];
  }
  return { width: png.width, height: png.height, pixels };
}

export function encodePng(image: RgbImage): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  for (let i = 0, j = 0; j < image.pixels.length; i += 4, j += 3) {
    png.data[i] = image.pixels[j];
    png.data[i + 1] = image.pixels[j + 1];
    png.data[i + 2] = image.pixels[j + 2];
    png.data[i + 3] = 255;
  }
  return PNG.sync.write(png, { deflateLevel: 9, deflateStrategy: 0 });
}
