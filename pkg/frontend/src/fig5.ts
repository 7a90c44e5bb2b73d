import { runFigure } from "./cli.js";
import { buildFig5 } from "./figures.js";

runFigure("fig5", buildFig5);
