import { runFigure } from "./cli.js";
import { buildFig4 } from "./figures.js";

runFigure("fig4", buildFig4);
