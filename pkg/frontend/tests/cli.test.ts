import { execFileSync, spawnSync } from "node:child_process";
import { existsSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

const ROOT = new URL("..", import.meta.url).pathname;
const CLI = join(ROOT, "dist", "cli.js");
const FIX = join(ROOT, "tests", "fixtures");
const SCALED = join(FIX, "scaled");

function runCli(args: string[]) {
  return spawnSync("node", [CLI, ...args], { encoding: "utf8" });
}

describe("cli", () => {
  beforeAll(() => {
    if (!existsSync(CLI)) {
      execFileSync("npx", ["tsc"], { cwd: ROOT });
    }
  });

  it("renders a coverage figure and prints the output path", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-cli-"));
    const out = join(dir, "coverage.svg");
    const res = runCli(["--input", join(SCALED, "coverage.csv"), "--kind", "coverage", "--out", out]);
    expect(res.status).toBe(0);
    expect(res.stdout.trim()).toBe(out);
    expect(existsSync(out)).toBe(true);
  });

  it("fails with a parse error on an empty CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-cli-"));
    const res = runCli(["--input", join(FIX, "empty.csv"), "--kind", "traces", "--out", join(dir, "t.svg")]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/empty CSV/);
  });

  it("fails on a schema mismatch with both headers named", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-cli-"));
    const res = runCli(["--input", join(SCALED, "traces.csv"), "--kind", "coverage", "--out", join(dir, "c.svg")]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/expected header "checkpoint_n,mode,coverage,se"/);
  });

  it("rejects an unknown kind", () => {
    const res = runCli(["--input", join(SCALED, "coverage.csv"), "--kind", "pie", "--out", "x.svg"]);
    expect(res.status).not.toBe(0);
  });
});
