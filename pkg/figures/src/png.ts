import { Resvg } from "@resvg/resvg-js";

/** Rasterize generated SVG text. Vector output is the reproducible form;
 * PNG is a convenience fallback rendered with the host's fonts. */
export function svgToPng(svg: string): Buffer {
  const resvg = new Resvg(svg, {
    background: "#ffffff",
    font: {
      loadSystemFonts: true,
      defaultFontFamily: "DejaVu Sans",
    },
  });
  return resvg.render().asPng();
}
