// Scripted end-to-end session against the real service: five enrollment
// attempts train a template, a replayed genuine attempt is accepted, and
// a far-off typing profile is rejected. The service is spawned as a child
// process; every payload goes through the same CaptureSession code the
// browser uses.

import { type ChildProcess, spawn } from "node:child_process"
import { mkdtempSync, rmSync } from "node:fs"
import net from "node:net"
import { tmpdir } from "node:os"
import { join } from "node:path"
import { afterAll, beforeAll, describe, expect, it } from "vitest"

import { api } from "../src/api.js"
import { CaptureSession, payloadViolations, type SamplePayload } from "../src/capture.js"

const TARGET = ".tie5Roanl"

const SERVICE_SCRIPT = `
import sys
import uvicorn
from keydyn.service import KeystrokeService, ServiceConfig, create_app

service = KeystrokeService(ServiceConfig(store_dir=sys.argv[1]))
uvicorn.run(create_app(service), host="127.0.0.1", port=int(sys.argv[2]), log_level="warning")
`

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer()
    srv.once("error", reject)
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address()
      if (address && typeof address === "object") {
        const port = address.port
        srv.close(() => resolve(port))
      } else {
        srv.close(() => reject(new Error("no port assigned")))
      }
    })
  })
}

// deterministic pseudo-random stream (mulberry32)
function rng(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) >>> 0
    let t = a
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function gaussian(rand: () => number, mean: number, std: number): number {
  const u = Math.max(rand(), 1e-12)
  const v = rand()
  return mean + std * Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v)
}

/** Simulates a human typing the target: key events fed into the capture session. */
function typeAttempt(
  userId: string,
  sampleId: string,
  rand: () => number,
  holdMean: number,
  flightMean: number,
): SamplePayload {
  const session = new CaptureSession(userId, TARGET, "ENROLL")
  let t = 10_000 * rand()
  for (const ch of TARGET) {
    const hold = Math.max(1, gaussian(rand, holdMean, holdMean * 0.08))
    session.keyDown(ch, t)
    session.keyUp(ch, t + hold)
    t += hold + Math.max(1, gaussian(rand, flightMean, flightMean * 0.15))
  }
  return session.finish(sampleId)
}

describe("live service round trip", () => {
  let proc: ChildProcess
  let store: string
  let base: string
  let stderr = ""

  beforeAll(async () => {
    store = mkdtempSync(join(tmpdir(), "keydyn-ui-test-"))
    const port = await freePort()
    base = `http://127.0.0.1:${port}`
    proc = spawn("python3", ["-c", SERVICE_SCRIPT, store, String(port)], {
      stdio: ["ignore", "ignore", "pipe"],
    })
    proc.stderr?.on("data", (chunk) => {
      stderr += String(chunk)
    })

    const deadline = Date.now() + 20_000
    for (;;) {
      try {
        await api.health(base)
        return
      } catch {
        if (Date.now() > deadline) {
          throw new Error(`service did not come up:\n${stderr}`)
        }
        await new Promise((r) => setTimeout(r, 200))
      }
    }
  }, 30_000)

  afterAll(() => {
    proc?.kill()
    if (store) rmSync(store, { recursive: true, force: true })
  })

  it("enrolls in five attempts, accepts genuine, rejects a far profile", async () => {
    const genuine = rng(42)
    for (let i = 0; i < 5; i++) {
      const payload = typeAttempt("webuser", `enroll-${i}`, genuine, 95, 140)
      expect(payloadViolations(payload)).toEqual([])
      const res = await api.enroll(base, payload)
      expect(res.samples).toBe(i + 1)
      expect(res.trained).toBe(i === 4)
    }

    const probe = typeAttempt("webuser", "probe-genuine", genuine, 95, 140)
    expect(payloadViolations(probe)).toEqual([])
    const accepted = await api.verify(base, probe)
    expect(accepted.decision).toBe("ACCEPT")

    const impostor = typeAttempt("webuser", "probe-impostor", rng(7), 420, 680)
    expect(payloadViolations(impostor)).toEqual([])
    const rejected = await api.verify(base, impostor)
    expect(rejected.decision).toBe("REJECT")
    expect(rejected.score).toBeGreaterThan(accepted.score)

    const users = await api.users(base)
    expect(users).toEqual([{ user_id: "webuser", trained: true, samples: 5 }])
  }, 60_000)

  it("surfaces service errors with their error_code", async () => {
    const probe = typeAttempt("ghost", "p0", rng(3), 95, 140)
    await expect(api.verify(base, probe)).rejects.toMatchObject({ code: "unknown_user" })
  }, 30_000)
})
