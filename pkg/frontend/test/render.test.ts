import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { run } from "../src/main.js";

const CSV = [
  "protocol,model,alpha,gamma,limit,horizon,epsilon,revenue,honest_revenue,states,iterations,wall_time_ms",
  "bitcoin,generic,0.25,0.0,7,30.0,0.01,0.25,0.25,7394,210,800",
  "bitcoin,generic,0.45,0.0,7,30.0,0.01,0.55,0.45,7394,230,812",
  "bitcoin,traditional,0.25,0.0,7,30.0,0.01,0.25,0.25,134,190,6",
  "bitcoin,traditional,0.45,0.0,7,30.0,0.01,0.549,0.45,134,200,7",
].join("\n") + "\n";

let dir: string;
let errors: string[];

beforeEach(() => {
  dir = mkdtempSync(join(tmpdir(), "sweep-charts-"));
  errors = [];
  vi.spyOn(console, "error").mockImplementation((...args: unknown[]) => {
    errors.push(args.join(" "));
  });
});

afterEach(() => {
  vi.restoreAllMocks();
});

describe("run", () => {
  it("renders a CSV to a stable SVG file", () => {
    const input = join(dir, "results.csv");
    writeFileSync(input, CSV);
    const out1 = join(dir, "a.svg");
    const out2 = join(dir, "b.svg");
    expect(run(["render", "--in", input, "--out", out1])).toBe(0);
    expect(run(["render", "--in", input, "--out", out2])).toBe(0);
    const svg = readFileSync(out1, "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain('class="facet"');
    expect(readFileSync(out2, "utf8")).toBe(svg);
  });

  it("reports unreadable input", () => {
    expect(run(["render", "--in", join(dir, "nope.csv"), "--out", join(dir, "o.svg")])).toBe(1);
    expect(errors.join("\n")).toContain("cannot read");
  });

  it("reports a missing column by name", () => {
    const input = join(dir, "bad.csv");
    writeFileSync(input, "alpha,gamma,model\n0.1,0.0,generic\n");
    expect(run(["render", "--in", input, "--out", join(dir, "o.svg")])).toBe(1);
    expect(errors.join("\n")).toContain("missing column: revenue");
  });

  it("reports an empty CSV", () => {
    const input = join(dir, "empty.csv");
    writeFileSync(input, "");
    expect(run(["render", "--in", input, "--out", join(dir, "o.svg")])).toBe(1);
    expect(errors.join("\n")).toContain("empty CSV");
  });

  it("rejects unknown commands and missing flags", () => {
    expect(run(["paint"])).toBe(1);
    expect(run(["render", "--in", "x.csv"])).toBe(1);
  });
});
