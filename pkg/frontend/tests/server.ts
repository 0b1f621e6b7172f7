// Spawns the real Python API server for integration tests.

import { spawn, execFileSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, copyFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

export interface RunningServer {
  baseUrl: string;
  projectFile: string;
  stop: () => void;
}

export function prepareFixture(name: string, pythonSetup?: string): string {
  const dir = mkdtempSync(join(tmpdir(), "capweave-ui-"));
  const target = join(dir, name);
  if (pythonSetup) {
    execFileSync("python3", ["-c", pythonSetup, target], { cwd: REPO_ROOT });
  } else {
    copyFileSync(join(REPO_ROOT, "fixtures", name), target);
  }
  return target;
}

export async function startServer(projectFile: string, port: number): Promise<RunningServer> {
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "capweave.cli", "serve", projectFile, "--port", String(port)],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/graph`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error("API server did not come up in time");
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  return {
    baseUrl,
    projectFile,
    stop: () => {
      proc.kill();
    },
  };
}
