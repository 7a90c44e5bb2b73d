/** Regenerate every figure from a fixture root in one call. */
import { join } from "path";
import { writeSvg } from "./cli.js";
import {
  buildFig2,
  buildFig3,
  buildFig4,
  buildFig5,
  buildFig6,
} from "./figures.js";

const root = process.argv[2];
const out = process.argv[3];
if (!root || !out) {
  console.error("usage: all <fixture-root> <output-dir>");
  process.exit(2);
}
writeSvg(join(out, "fig2.svg"), buildFig2(join(root, "align")).svg);
writeSvg(join(out, "fig3.svg"), buildFig3(join(root, "memory")).svg);
writeSvg(join(out, "fig4.svg"), buildFig4(root).svg);
writeSvg(join(out, "fig5.svg"), buildFig5(root).svg);
writeSvg(join(out, "fig6.svg"), buildFig6(join(root, "sweep")).svg);
console.log(`wrote fig2..fig6 to ${out}`);
