import { runFigure } from "./cli.js";
import { buildFig3 } from "./figures.js";

runFigure("fig3", buildFig3);
