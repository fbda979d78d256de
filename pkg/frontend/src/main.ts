// DOM wiring: one CaptureSession per attempt series, keyboard listeners
// on the typing box, and the enroll/verify flows against the service.
// Timestamps always come from performance.now() (monotonic), never from
// the wall clock.

import { api, ApiError } from "./api.js"
import { CaptureError, CaptureSession, payloadViolations, type SensorReadings } from "./capture.js"

const DEFAULT_TARGET = ".tie5Roanl"
const POINTER_FRESH_MS = 150

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

const userInput = el<HTMLInputElement>("user")
const targetInput = el<HTMLInputElement>("target")
const modeEnroll = el<HTMLInputElement>("mode-enroll")
const typingBox = el<HTMLInputElement>("typing")
const statusBox = el<HTMLDivElement>("status")
const banner = el<HTMLDivElement>("banner")
const progressBox = el<HTMLDivElement>("progress")

targetInput.value = DEFAULT_TARGET

let session: CaptureSession | null = null
let attemptCounter = 0
let inFlight = false

// latest touch/pen contact, attached to key events while fresh
let lastPointer: { readings: SensorReadings; at: number } | null = null

function mode(): "ENROLL" | "VERIFY" {
  return modeEnroll.checked ? "ENROLL" : "VERIFY"
}

function freshSession(): CaptureSession {
  session = new CaptureSession(userInput.value.trim(), targetInput.value, mode())
  return session
}

function setBanner(kind: "ok" | "bad" | "info" | "", text: string): void {
  banner.className = kind ? `banner ${kind}` : "banner"
  banner.textContent = text
}

function setStatus(text: string): void {
  statusBox.textContent = text
}

function pointerSensors(): SensorReadings {
  if (!lastPointer) return {}
  if (performance.now() - lastPointer.at > POINTER_FRESH_MS) return {}
  return lastPointer.readings
}

typingBox.addEventListener("pointerdown", (e: PointerEvent) => {
  const readings: SensorReadings = { x: e.screenX, y: e.screenY }
  if (e.pressure > 0) readings.pressure = e.pressure
  if (e.width > 1 || e.height > 1) readings.size = e.width * e.height
  lastPointer = { readings, at: performance.now() }
})

typingBox.addEventListener("keydown", (e: KeyboardEvent) => {
  if (e.key === "Enter") {
    e.preventDefault()
    void submitAttempt()
    return
  }
  if (!session) freshSession()
  session!.keyDown(e.key, performance.now(), pointerSensors())
})

typingBox.addEventListener("keyup", (e: KeyboardEvent) => {
  session?.keyUp(e.key, performance.now())
})

async function submitAttempt(): Promise<void> {
  if (inFlight) return
  if (!session) {
    setBanner("info", "type the target text first")
    return
  }
  const active = session
  session = null
  typingBox.value = ""

  let payload
  try {
    payload = active.finish(`attempt-${Date.now()}-${attemptCounter++}`)
  } catch (err) {
    if (err instanceof CaptureError) {
      setBanner("bad", `${err.code}: ${err.message} (attempt discarded, nothing sent)`)
      return
    }
    throw err
  }
  const violations = payloadViolations(payload)
  if (violations.length > 0) {
    setBanner("bad", `attempt discarded, invalid timing: ${violations.join("; ")}`)
    return
  }

  const base = ""
  inFlight = true
  typingBox.disabled = true
  try {
    if (active.mode === "ENROLL") {
      const res = await api.enroll(base, payload)
      const missing = Math.max(0, 5 - res.samples)
      progressBox.textContent = res.trained
        ? `template trained after ${res.samples} samples — verification unlocked`
        : `${res.samples} sample(s) stored, about ${missing} more to train`
      setBanner(res.trained ? "ok" : "info", res.trained ? "trained" : "sample stored")
    } else {
      const res = await api.verify(base, payload)
      const verdict = res.decision === "ACCEPT" ? "ok" : "bad"
      setBanner(verdict, `${res.decision} (score ${res.score.toFixed(3)})`)
    }
    setStatus("")
  } catch (err) {
    if (err instanceof ApiError) {
      setBanner("bad", `${err.code}: ${err.message}`)
      if (err.code === "network") {
        setStatus("service unreachable — check the server and press Enter to retry")
      } else if (err.details) {
        setStatus(JSON.stringify(err.details))
      }
    } else {
      setBanner("bad", String(err))
    }
  } finally {
    inFlight = false
    typingBox.disabled = false
    typingBox.focus()
  }
}

el<HTMLButtonElement>("reset-user").addEventListener("click", () => {
  void (async () => {
    try {
      await api.reset("", userInput.value.trim())
      setBanner("info", "user removed")
      progressBox.textContent = ""
    } catch (err) {
      setBanner("bad", err instanceof ApiError ? `${err.code}: ${err.message}` : String(err))
    }
  })()
})

for (const input of [userInput, targetInput]) {
  input.addEventListener("change", () => {
    session = null
    typingBox.value = ""
    progressBox.textContent = ""
    setBanner("", "")
  })
}

void api
  .health("")
  .then(() => setStatus("service reachable — pick a user id and start typing"))
  .catch(() => setStatus("service unreachable — start it with: keydyn serve --static frontend/dist"))
