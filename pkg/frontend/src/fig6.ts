import { runFigure } from "./cli.js";
import { buildFig6 } from "./figures.js";

runFigure("fig6", buildFig6);
