import { runFigure } from "./cli.js";
import { buildFig2 } from "./figures.js";

runFigure("fig2", buildFig2);
