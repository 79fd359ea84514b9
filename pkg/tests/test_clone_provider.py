import base64
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from mispron.audio import AudioBuffer, encode_wav, write_wav
from mispron.clone_provider import (
    TOKEN_ENV,
    CloneRequest,
    fetch_clone_local,
    fetch_clone_remote,
    fetch_clones,
)
from mispron.errors import BadPayload, CloneNotFound, CloneTimeout, RemoteError
from mispron.textgrid import TextGrid, serialize_textgrid, words_tier, write_textgrid

TONE = AudioBuffer(0.3 * np.sin(2 * np.pi * 220 * np.arange(8000) / 16000), 16000)


class Stub:
    """Scripted HTTP server: each POST pops the next (status, body, delay) action."""

    def __init__(self, script):
        self.script = list(script)
        self.seen = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                stub.seen.append((dict(self.headers), body))
                status, payload, delay = stub.script.pop(0) if stub.script else (500, {}, 0)
                if delay:
                    time.sleep(delay)
                if payload == "echo":
                    payload = {"audio_b64": body["audio_b64"]}
                data = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
                try:
                    self.send_response(status)
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *a):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}/clone"

    def __enter__(self):
        threading.Thread(target=self.server.serve_forever, daemon=True).start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


def req(audio=TONE):
    return CloneRequest("u1", "robbery bribery fraud", "voice-7", audio)


def no_sleep(_):
    pass


def test_echo_roundtrip():
    with Stub([(200, "echo", 0)]) as stub:
        res = fetch_clone_remote(stub.url, req(), sleep=no_sleep)
    assert res.source == "remote" and res.retries == 0
    assert np.array_equal(res.audio.samples, AudioBuffer(np.round(TONE.samples * 32768) / 32768, 16000).samples)
    assert stub.seen[0][1]["voice_id"] == "voice-7"
    assert stub.seen[0][1]["transcript"] == "robbery bribery fraud"


def test_alignment_returned():
    grid = TextGrid(0.0, 0.5, (words_tier([(0.1, 0.4, "fraud")], 0.5),))
    body = {"audio_b64": base64.b64encode(encode_wav(TONE)).decode(), "alignment_textgrid": serialize_textgrid(grid)}
    with Stub([(200, body, 0)]) as stub:
        res = fetch_clone_remote(stub.url, req(), sleep=no_sleep)
    assert res.alignment == grid


def test_retries_on_5xx():
    delays = []
    with Stub([(500, {}, 0), (503, {}, 0), (200, "echo", 0)]) as stub:
        res = fetch_clone_remote(stub.url, req(), retries=3, sleep=delays.append)
    assert res.retries == 2 and len(stub.seen) == 3
    assert 0.5 <= delays[0] <= 0.75 and 1.0 <= delays[1] <= 1.5


def test_5xx_exhausted():
    with Stub([(500, {}, 0)] * 3) as stub:
        with pytest.raises(RemoteError) as ei:
            fetch_clone_remote(stub.url, req(), retries=2, sleep=no_sleep)
    assert ei.value.status == 500 and len(stub.seen) == 3


def test_no_retry_on_4xx():
    with Stub([(400, {"error": "bad"}, 0), (200, "echo", 0)]) as stub:
        with pytest.raises(RemoteError) as ei:
            fetch_clone_remote(stub.url, req(), retries=3, sleep=no_sleep)
    assert ei.value.status == 400 and len(stub.seen) == 1


def test_timeout():
    with Stub([(200, "echo", 1.0)]) as stub:
        with pytest.raises(CloneTimeout):
            fetch_clone_remote(stub.url, req(), timeout=0.2, retries=0, sleep=no_sleep)


@pytest.mark.parametrize("body", [{"nope": 1}, {"audio_b64": "!!!"}, b"not json", {"audio_b64": base64.b64encode(b"RIFFjunk").decode()}])
def test_bad_payload(body):
    with Stub([(200, body, 0)]) as stub:
        with pytest.raises(BadPayload):
            fetch_clone_remote(stub.url, req(), sleep=no_sleep)


def test_bearer_token_sent(monkeypatch):
    monkeypatch.setenv(TOKEN_ENV, "s3cret")
    with Stub([(200, "echo", 0)]) as stub:
        fetch_clone_remote(stub.url, req(), sleep=no_sleep)
    assert stub.seen[0][0]["Authorization"] == "Bearer s3cret"


def test_token_not_logged(monkeypatch, caplog):
    monkeypatch.setenv(TOKEN_ENV, "s3cret")
    caplog.set_level("DEBUG")
    with Stub([(500, {}, 0), (200, "echo", 0)]) as stub:
        fetch_clone_remote(stub.url, req(), sleep=no_sleep)
    assert "s3cret" not in caplog.text


def test_local_with_and_without_grid(tmp_path):
    write_wav(TONE, tmp_path / "u1_clone.wav")
    res = fetch_clone_local(tmp_path, req(None))
    assert res.alignment is None and res.source == "local" and len(res.audio) == len(TONE)
    grid = TextGrid(0.0, 0.5, (words_tier([(0.1, 0.4, "fraud")], 0.5),))
    write_textgrid(grid, tmp_path / "u1_clone.TextGrid")
    res2 = fetch_clone_local(tmp_path, req(None))
    assert res2.alignment == grid
    assert np.array_equal(res.audio.samples, res2.audio.samples)


def test_local_missing(tmp_path):
    with pytest.raises(CloneNotFound):
        fetch_clone_local(tmp_path, req(None))


def test_empty_transcript_rejected():
    with pytest.raises(ValueError):
        CloneRequest("u", "   ")


def test_fetch_clones_sorted(tmp_path):
    for uid in ("b", "a", "c"):
        write_wav(TONE, tmp_path / f"{uid}_clone.wav")
    reqs = [CloneRequest(u, "x") for u in ("c", "a", "b")]
    out = fetch_clones(reqs, lambda r: fetch_clone_local(tmp_path, r), max_in_flight=3)
    assert list(out) == ["a", "b", "c"]
