"""Obtaining the TTS clone of an utterance: from a local directory or a remote HTTP service.

Remote wire contract::

    POST <endpoint>   {"utterance_id", "transcript", "voice_id", "audio_b64"?}
    200 OK            {"audio_b64", "alignment_textgrid"?}

The bearer token is read from ``MISPRON_TTS_TOKEN`` and is never logged.
"""
from __future__ import annotations

import base64
import binascii
import logging
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import requests

from .audio import CANONICAL_RATE, AudioBuffer, decode_wav, encode_wav, resample
from .errors import BadPayload, CloneNotFound, CloneTimeout, DataError, RemoteError
from .textgrid import TextGrid, parse_textgrid, read_textgrid

log = logging.getLogger(__name__)

TOKEN_ENV = "MISPRON_TTS_TOKEN"


@dataclass(frozen=True)
class CloneRequest:
    utterance_id: str
    transcript: str
    speaker_voice_id: str = ""
    audio: AudioBuffer | None = None

    def __post_init__(self):
        if not self.transcript.strip():
            raise ValueError("clone request needs a non-empty transcript")

    def payload(self) -> dict:
        body = {
            "utterance_id": self.utterance_id,
            "transcript": self.transcript,
            "voice_id": self.speaker_voice_id,
        }
        if self.audio is not None:
            body["audio_b64"] = base64.b64encode(encode_wav(self.audio)).decode("ascii")
        return body


@dataclass(frozen=True)
class CloneResult:
    audio: AudioBuffer
    alignment: TextGrid | None
    source: str  # "local" | "remote"
    latency: float
    retries: int = 0


def fetch_clone_local(root: str | Path, req: CloneRequest) -> CloneResult:
    t0 = time.perf_counter()
    root = Path(root)
    wav = root / f"{req.utterance_id}_clone.wav"
    grid = root / f"{req.utterance_id}_clone.TextGrid"
    if not wav.is_file():
        raise CloneNotFound(f"no clone audio at {wav}")
    audio = resample(decode_wav(wav.read_bytes()), CANONICAL_RATE)
    alignment = read_textgrid(grid) if grid.is_file() else None
    return CloneResult(audio, alignment, "local", time.perf_counter() - t0)


def _backoff(attempt: int, base: float) -> float:
    delay = base * 2 ** attempt
    return delay + random.uniform(0, delay / 2)


def fetch_clone_remote(
    endpoint: str,
    req: CloneRequest,
    timeout: float = 30.0,
    retries: int = 3,
    backoff_base: float = 0.5,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> CloneResult:
    """POST the request, retrying 5xx responses and timeouts with exponential backoff.

    4xx responses fail immediately with :class:`RemoteError`.
    """
    http = session or requests.Session()
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(TOKEN_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    payload = req.payload()
    t0 = time.perf_counter()
    last_exc: Exception | None = None
    for attempt in range(retries + 1):
        if attempt:
            sleep(_backoff(attempt - 1, backoff_base))
        try:
            resp = http.post(endpoint, json=payload, headers=headers, timeout=timeout)
        except requests.Timeout:
            last_exc = CloneTimeout(f"{req.utterance_id}: no response within {timeout}s")
            log.info("clone %s: timeout (attempt %d)", req.utterance_id, attempt + 1)
            continue
        except requests.ConnectionError as exc:
            last_exc = RemoteError(0, str(exc))
            continue
        if 500 <= resp.status_code < 600:
            last_exc = RemoteError(resp.status_code, resp.text)
            log.info("clone %s: HTTP %d (attempt %d)", req.utterance_id, resp.status_code, attempt + 1)
            continue
        if resp.status_code != 200:
            raise RemoteError(resp.status_code, resp.text)
        audio, grid = _parse_response(resp)
        return CloneResult(audio, grid, "remote", time.perf_counter() - t0, retries=attempt)
    assert last_exc is not None
    raise last_exc


def _parse_response(resp: requests.Response) -> tuple[AudioBuffer, TextGrid | None]:
    try:
        body = resp.json()
        raw = base64.b64decode(body["audio_b64"], validate=True)
    except (ValueError, KeyError, TypeError, binascii.Error) as exc:
        raise BadPayload(f"bad clone response: {exc}") from None
    try:
        audio = resample(decode_wav(raw), CANONICAL_RATE)
        tg = body.get("alignment_textgrid")
        grid = parse_textgrid(tg) if tg else None
    except DataError as exc:
        raise BadPayload(f"undecodable clone payload: {exc}") from None
    if len(audio) == 0:
        raise BadPayload("clone audio is empty")
    return audio, grid


def fetch_clones(
    requests_: Iterable[CloneRequest],
    fetch: Callable[[CloneRequest], CloneResult],
    max_in_flight: int = 4,
) -> dict[str, CloneResult]:
    """Run ``fetch`` concurrently; results keyed (and ordered) by utterance id."""
    reqs = sorted(requests_, key=lambda r: r.utterance_id)
    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        results = list(pool.map(fetch, reqs))
    return {r.utterance_id: res for r, res in zip(reqs, results)}
