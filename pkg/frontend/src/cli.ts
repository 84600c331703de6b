/**
 * CLI entry: render one panel spec or a whole manifest.
 *
 *   node dist/cli.js render --panel panel.json --data DIR --out DIR
 *   node dist/cli.js render-all --manifest manifest.json --data DIR --out DIR
 *
 * render-all continues past per-panel failures and reports a summary;
 * the exit code is 1 if any panel failed, 0 otherwise.
 */

import { readFileSync } from "fs";

import { PanelSpec, renderAll, renderPanel } from "./panels.js";

function getFlag(args: string[], name: string): string {
  const i = args.indexOf(`--${name}`);
  if (i < 0 || i + 1 >= args.length) {
    console.error(`missing required flag --${name}`);
    process.exit(2);
  }
  return args[i + 1];
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command === "render") {
    const panel = JSON.parse(readFileSync(getFlag(rest, "panel"), "utf-8")) as PanelSpec;
    const result = renderPanel(panel, getFlag(rest, "data"), getFlag(rest, "out"));
    console.log(`rendered ${result.id}: ${result.svgPath}, ${result.pngPath}`);
    return 0;
  }
  if (command === "render-all") {
    const outcome = renderAll(getFlag(rest, "manifest"), getFlag(rest, "data"), getFlag(rest, "out"));
    for (const r of outcome.rendered) {
      console.log(`rendered ${r.id}: ${r.svgPath}, ${r.pngPath}`);
    }
    for (const f of outcome.failures) {
      console.error(`failed ${f.id}: ${f.error}`);
    }
    console.log(`${outcome.rendered.length} rendered, ${outcome.failures.length} failed`);
    return outcome.failures.length > 0 ? 1 : 0;
  }
  console.error("usage: cli.js render --panel P.json --data DIR --out DIR");
  console.error("       cli.js render-all --manifest M.json --data DIR --out DIR");
  return 2;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
