// Thin client for the enroll/verify HTTP API. Service errors arrive as
// {error_code, message, details?}; network failures surface as ApiError
// with code "network" so the UI can offer a retry.

import type { SamplePayload } from "./capture.js"

export interface EnrollResponse {
  user_id: string
  samples: number
  trained: boolean
}

export interface VerifyResponse {
  decision: "ACCEPT" | "REJECT"
  score: number
}

export interface UserEntry {
  user_id: string
  trained: boolean
  samples: number
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly details?: unknown,
    readonly status?: number,
  ) {
    super(message)
    this.name = "ApiError"
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  let response: Response
  try {
    response = await fetch(base + path, init)
  } catch (err) {
    throw new ApiError("network", `cannot reach service at ${base}: ${String(err)}`)
  }
  const text = await response.text()
  let body: unknown = null
  try {
    body = text ? JSON.parse(text) : null
  } catch {
    throw new ApiError("bad_response", `non-JSON response (${response.status})`, text, response.status)
  }
  if (!response.ok) {
    const e = body as { error_code?: string; message?: string; details?: unknown }
    throw new ApiError(
      e?.error_code ?? `http_${response.status}`,
      e?.message ?? `request failed with status ${response.status}`,
      e?.details,
      response.status,
    )
  }
  return body as T
}

function post<T>(base: string, path: string, payload: unknown): Promise<T> {
  return request<T>(base, path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  })
}

export const api = {
  health: (base: string) => request<{ status: string }>(base, "/api/health"),
  enroll: (base: string, payload: SamplePayload) =>
    post<EnrollResponse>(base, "/api/enroll", payload),
  verify: (base: string, payload: SamplePayload) =>
    post<VerifyResponse>(base, "/api/verify", payload),
  users: (base: string) => request<UserEntry[]>(base, "/api/users"),
  reset: (base: string, userId: string) =>
    request<{ removed: boolean }>(base, `/api/users/${encodeURIComponent(userId)}`, {
      method: "DELETE",
    }),
}
