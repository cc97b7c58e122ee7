"""Backend abstraction for bulletin text generation: the local rules-based
generator and a vendor-neutral remote HTTP endpoint speak the same
interface, so evaluation treats systems interchangeably.

Remote wire format: POST application/json
{prompt, text_input?, media_manifest?} -> {"text": ...}. Configuration via
FF_ENDPOINT_URL / FF_TIMEOUT_S / FF_MAX_RETRIES or explicit arguments.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .errors import (
    BackendUnavailable,
    MalformedResponse,
    MissingAttribute,
    UnknownBackend,
)
from .generator import generate_area_bulletin
from .grammar import attribute_fragments, render_bulletin
from .grid import AreaSeries, load_area_registry
from .scales import load_weather_codes

_PROMPT_DIR = Path(__file__).parent / "data" / "prompts"

#: reducer each attribute series is expected to carry
SERIES_REDUCERS = {
    "wind_speed": "areal-max",
    "wind_direction": "areal-circular-mean",
    "wave_height": "areal-mean",
    "visibility": "areal-mean",
    "weather_code": "areal-max",
}


@dataclass(frozen=True)
class GenerationRequest:
    attribute: str | None            # wind | sea_state | weather | visibility | None=whole bulletin
    area: str
    text_input: str | None = None    # JSON data summary (local + LLM-style remote)
    media_ref: str | None = None     # frameset.json path (VLM-style remote)
    prompt_profile: str = "default"

    def __post_init__(self):
        if (self.text_input is None) == (self.media_ref is None):
            raise ValueError("exactly one of text_input or media_ref required")


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    latency_ms: float
    backend_id: str


@dataclass
class BatchItem:
    """Positional batch result; exactly one of response/error is set."""

    response: GenerationResponse | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.response is not None


def series_to_text_input(area: str, series: dict[str, AreaSeries]) -> str:
    """Serialize per-attribute series as the gateway's textual data summary."""
    return json.dumps({
        "area": area,
        "series": {name: [None if np.isnan(v) else float(v) for v in s.values]
                   for name, s in series.items()},
    })


def load_prompt(profile: str, guidance: str = "", few_shot: str = "") -> str:
    path = _PROMPT_DIR / f"{profile}.txt"
    if not path.is_file():
        raise UnknownBackend(f"no prompt profile {profile!r}")
    return path.read_text(encoding="utf-8").format(guidance=guidance,
                                                   few_shot=few_shot)


class LocalRulesBackend:
    """Deterministic reference backend delegating to the rules generator."""

    backend_id = "local"

    def __init__(self, registry=None, code_map=None):
        self.registry = registry or load_area_registry()
        self.code_map = code_map or load_weather_codes()

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        if request.text_input is None:
            raise MalformedResponse("local backend requires a textual data summary")
        start = time.perf_counter()
        doc = json.loads(request.text_input)
        area = self.registry[doc["area"]]
        series = {name: AreaSeries(area=area.name, variable=name,
                                   values=np.array([np.nan if v is None else v
                                                    for v in vals]),
                                   reducer=SERIES_REDUCERS.get(name, "areal-mean"))
                  for name, vals in doc["series"].items()}
        bulletin = generate_area_bulletin(series, area, self.code_map)
        if request.attribute is None:
            text = render_bulletin(bulletin, self.registry)
        else:
            fragments = attribute_fragments(bulletin)
            if request.attribute not in fragments:
                raise MissingAttribute(f"no fragment for {request.attribute!r}")
            text = fragments[request.attribute]
        latency = (time.perf_counter() - start) * 1000.0
        return GenerationResponse(text=text, latency_ms=latency,
                                  backend_id=self.backend_id)


class RemoteBackend:
    """Minimal JSON-over-HTTP client with bounded retries on timeout only."""

    def __init__(self, url: str | None = None, timeout_s: float | None = None,
                 max_retries: int | None = None, bearer_token: str | None = None,
                 backend_id: str = "remote", session=None):
        self.url = url or os.environ.get("FF_ENDPOINT_URL")
        if not self.url:
            raise BackendUnavailable("no endpoint URL configured (FF_ENDPOINT_URL)")
        self.timeout_s = float(timeout_s if timeout_s is not None
                               else os.environ.get("FF_TIMEOUT_S", 30))
        self.max_retries = int(max_retries if max_retries is not None
                               else os.environ.get("FF_MAX_RETRIES", 2))
        self.bearer_token = bearer_token
        self.backend_id = backend_id
        self._session = session or requests

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        body = {"prompt": load_prompt(request.prompt_profile)}
        if request.text_input is not None:
            body["text_input"] = request.text_input
        else:
            body["media_manifest"] = json.loads(
                Path(request.media_ref).read_text(encoding="utf-8"))
        headers = {"content-type": "application/json"}
        if self.bearer_token:
            headers["authorization"] = f"Bearer {self.bearer_token}"

        start = time.perf_counter()
        last_exc = None
        for attempt in range(self.max_retries + 1):
            try:
                resp = self._session.post(self.url, json=body, headers=headers,
                                          timeout=self.timeout_s)
                break
            except requests.Timeout as exc:
                last_exc = exc
                if attempt < self.max_retries:
                    time.sleep(0.5 * 2 ** attempt)
            except requests.ConnectionError as exc:
                raise BackendUnavailable(f"cannot reach {self.url}: {exc}") from exc
        else:
            raise BackendUnavailable(f"timed out after {self.max_retries + 1} "
                                     f"attempts: {last_exc}")
        if not 200 <= resp.status_code < 300:
            raise BackendUnavailable(f"endpoint returned {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise MalformedResponse(f"non-JSON reply: {exc}") from exc
        if not isinstance(payload, dict) or "text" not in payload:
            raise MalformedResponse("reply missing 'text' field")
        latency = (time.perf_counter() - start) * 1000.0
        return GenerationResponse(text=payload["text"], latency_ms=latency,
                                  backend_id=self.backend_id)


def make_backend(backend_id: str, **kwargs):
    if backend_id == "local":
        return LocalRulesBackend(**kwargs)
    if backend_id == "remote":
        return RemoteBackend(**kwargs)
    raise UnknownBackend(f"unknown backend {backend_id!r}")


def batch_generate(backend, requests_: list[GenerationRequest],
                   parallelism: int = 1) -> list[BatchItem]:
    """Run a request batch with at most `parallelism` in flight; results are
    positionally aligned and per-request failures are recorded inline."""
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")

    def run(req: GenerationRequest) -> BatchItem:
        try:
            return BatchItem(response=backend.generate(req))
        except Exception as exc:
            return BatchItem(error=f"{type(exc).__name__}: {exc}")

    if not requests_:
        return []
    workers = min(parallelism, len(requests_))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, requests_))
