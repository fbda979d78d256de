// Pure keystroke capture logic: pairs key-down with key-up per key
// identity (a stack per key, so rollover pairs correctly), rebases
// timestamps to first-down = 0, and refuses attempts that do not spell
// the target text exactly. No DOM access here; timestamps come from the
// caller's monotonic clock.

export interface SensorReadings {
  pressure?: number
  size?: number
  x?: number
  y?: number
}

export interface CaptureEvent {
  key_label: string
  down_ms: number
  up_ms: number
  pressure?: number
  size?: number
  x?: number
  y?: number
}

export interface SamplePayload {
  user_id: string
  sample_id: string
  events: CaptureEvent[]
}

export type CaptureMode = "ENROLL" | "VERIFY"

export type CaptureErrorCode = "IncompleteAttempt" | "TextMismatch"

export class CaptureError extends Error {
  constructor(
    readonly code: CaptureErrorCode,
    message: string,
  ) {
    super(message)
    this.name = "CaptureError"
  }
}

// Keys that never count as keystrokes of the typed text.
const MODIFIER_KEYS = new Set([
  "Shift",
  "Control",
  "Alt",
  "AltGraph",
  "Meta",
  "CapsLock",
  "Tab",
  "Escape",
  "Enter",
  "ArrowLeft",
  "ArrowRight",
  "ArrowUp",
  "ArrowDown",
  "Home",
  "End",
  "Delete",
  "Insert",
  "PageUp",
  "PageDown",
  "NumLock",
  "ContextMenu",
  "Dead",
])

interface OpenPress {
  down_ms: number
  sensors: SensorReadings
}

export class CaptureSession {
  readonly userId: string
  readonly targetText: string
  readonly mode: CaptureMode
  attempts = 0

  private open = new Map<string, OpenPress[]>()
  private completed: CaptureEvent[] = []
  private typed = ""
  private corrected = false

  constructor(userId: string, targetText: string, mode: CaptureMode) {
    if (!userId) throw new Error("userId must be non-empty")
    if (!targetText) throw new Error("targetText must be non-empty")
    this.userId = userId
    this.targetText = targetText
    this.mode = mode
  }

  /** Feed one key-down. Returns true when the event was recorded. */
  keyDown(key: string, timestamp: number, sensors: SensorReadings = {}): boolean {
    if (MODIFIER_KEYS.has(key)) return false
    if (key === "Backspace") {
      // corrections invalidate the attempt instead of becoming features
      this.corrected = true
      return false
    }
    const stack = this.open.get(key)
    if (stack && stack.length > 0) {
      // OS auto-repeat re-fires keydown while held: only the first counts
      return false
    }
    this.open.set(key, [...(stack ?? []), { down_ms: timestamp, sensors }])
    this.typed += key
    return true
  }

  /** Feed one key-up; pairs with the oldest open press of the same key. */
  keyUp(key: string, timestamp: number): boolean {
    if (MODIFIER_KEYS.has(key) || key === "Backspace") return false
    const stack = this.open.get(key)
    const press = stack?.shift()
    if (!press) return false
    if (stack && stack.length === 0) this.open.delete(key)
    if (timestamp <= press.down_ms) {
      // clock anomaly; drop the pair rather than emit an impossible event
      return false
    }
    this.completed.push({
      key_label: key,
      down_ms: press.down_ms,
      up_ms: timestamp,
      ...press.sensors,
    })
    return true
  }

  get typedText(): string {
    return this.typed
  }

  get hasCorrection(): boolean {
    return this.corrected
  }

  /**
   * Close the attempt and build the wire payload (events ordered by press
   * time, rebased so the first down is 0). Throws CaptureError and leaves
   * nothing to send when a key is still held, a correction was used, or
   * the typed text differs from the target.
   */
  finish(sampleId: string): SamplePayload {
    try {
      if (this.open.size > 0) {
        const held = [...this.open.keys()].join(", ")
        throw new CaptureError("IncompleteAttempt", `key still held at submit: ${held}`)
      }
      if (this.corrected) {
        throw new CaptureError("TextMismatch", "attempt used a correction; please retype")
      }
      if (this.typed !== this.targetText) {
        throw new CaptureError(
          "TextMismatch",
          `typed ${JSON.stringify(this.typed)} but the target is ${JSON.stringify(this.targetText)}`,
        )
      }
      if (this.completed.length === 0) {
        throw new CaptureError("TextMismatch", "nothing was typed")
      }
      const events = [...this.completed].sort((a, b) => a.down_ms - b.down_ms)
      const base = events[0]!.down_ms
      const rebased = events.map((e) => ({
        ...e,
        down_ms: e.down_ms - base,
        up_ms: e.up_ms - base,
      }))
      this.attempts += 1
      return { user_id: this.userId, sample_id: sampleId, events: rebased }
    } finally {
      this.reset()
    }
  }

  /** Clear buffered state between attempts. */
  reset(): void {
    this.open.clear()
    this.completed = []
    this.typed = ""
    this.corrected = false
  }
}

/**
 * Client-side mirror of the server's sample invariants; a payload that
 * fails here would be rejected with invalid_sample anyway, so it is never
 * sent.
 */
export function payloadViolations(payload: SamplePayload): string[] {
  const violations: string[] = []
  if (payload.events.length === 0) {
    violations.push("events must be non-empty")
    return violations
  }
  let prevDown = -Infinity
  payload.events.forEach((e, i) => {
    if (!Number.isFinite(e.down_ms) || !Number.isFinite(e.up_ms)) {
      violations.push(`timestamps must be finite at index ${i}`)
      return
    }
    if (e.down_ms < 0) violations.push(`down_ms must be non-negative at index ${i}`)
    if (e.up_ms <= e.down_ms) violations.push(`up_ms must exceed down_ms at index ${i}`)
    if (e.down_ms < prevDown) violations.push(`down_ms must be non-decreasing at index ${i}`)
    prevDown = e.down_ms
  })
  return violations
}
