"""Generator backends: deterministic template, transcript replay, remote.

All three speak the same tiny interface: take an assembled prompt bundle,
return raw candidate program text.  Callers must still parse and validate
whatever comes back; a backend only promises transport, not correctness.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Protocol, runtime_checkable

import httpx

from hepkit.genpipe.prescription import Prescription, prescription_from_json
from hepkit.genpipe.prompt import PromptBundle, PromptConfig, assemble_prompt


class GenerationError(ValueError):
    """Base class for generation transport and lookup failures."""


class ReplayMissingError(GenerationError):
    """No recorded transcript exists for this prompt."""


class TransportError(GenerationError):
    """The remote generator could not be reached or answered badly."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


@dataclass(frozen=True)
class Provenance:
    """Where a candidate program came from."""

    backend: str
    timestamp: str
    prompt_digest: str


@runtime_checkable
class GeneratorBackend(Protocol):
    name: str

    def complete(self, bundle: PromptBundle) -> str: ...


class TemplateBackend:
    """Offline backend that compiles the prescription by fixed rules."""

    name = "template"

    def complete(self, bundle: PromptBundle) -> str:
        from hepkit.dsl import print_program
        from hepkit.genpipe.generate import compile_prescription

        rx = prescription_from_json(json.loads(bundle.prescription_payload))
        return print_program(compile_prescription(rx))


class ReplayBackend:
    """Backend that replays recorded transcripts keyed by prompt digest."""

    name = "replay"

    def __init__(self, directory: str | os.PathLike[str]):
        self.directory = Path(directory)

    def path_for(self, bundle: PromptBundle) -> Path:
        return self.directory / f"{bundle.digest}.txt"

    def complete(self, bundle: PromptBundle) -> str:
        path = self.path_for(bundle)
        if not path.is_file():
            raise ReplayMissingError(
                f"no transcript for prompt digest {bundle.digest} under {self.directory}"
            )
        return path.read_text(encoding="utf-8")

    def record(self, bundle: PromptBundle, text: str) -> Path:
        """Store a transcript so later runs can replay it."""
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(bundle)
        path.write_text(text, encoding="utf-8")
        return path


class RemoteBackend:
    """Backend speaking a chat-completions style HTTP contract."""

    name = "remote"

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str = "",
        client: httpx.Client | None = None,
        timeout: float = 60.0,
        retries: int = 2,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self._client = client

    def complete(self, bundle: PromptBundle) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": bundle.system_text},
                {"role": "user", "content": bundle.prescription_payload},
            ],
        }
        client = self._client or httpx.Client(timeout=self.timeout)
        owns_client = self._client is None
        last_error: Exception | None = None
        try:
            for attempt in range(1, self.retries + 2):
                try:
                    response = client.post(
                        f"{self.base_url}/chat/completions",
                        json=body,
                        headers=headers,
                    )
                    response.raise_for_status()
                    payload = response.json()
                    return payload["choices"][0]["message"]["content"]
                except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                    last_error = exc
                    if attempt <= self.retries:
                        time.sleep(min(0.25 * 2 ** (attempt - 1), 2.0))
            raise TransportError(
                f"generator at {self.base_url} failed after "
                f"{self.retries + 1} attempts: {last_error}",
                attempts=self.retries + 1,
            )
        finally:
            if owns_client:
                client.close()


def backend_from_env(env: Mapping[str, str] | None = None) -> GeneratorBackend:
    """Pick a backend from GENERATOR_* variables, defaulting to template."""
    env = os.environ if env is None else env
    url = env.get("GENERATOR_URL", "")
    if url:
        return RemoteBackend(
            base_url=url,
            model=env.get("GENERATOR_MODEL", "default"),
            api_key=env.get("GENERATOR_KEY", ""),
        )
    replay_dir = env.get("GENERATOR_REPLAY_DIR", "")
    if replay_dir:
        return ReplayBackend(replay_dir)
    return TemplateBackend()


def generate_program(
    rx: Prescription,
    backend: GeneratorBackend,
    config: PromptConfig | None = None,
) -> tuple[str, Provenance]:
    """Assemble the prompt, run the backend, and stamp provenance.

    The returned text is the raw candidate; parse and validate it before
    trusting it.
    """
    if config is None:
        from hepkit.genpipe.prompt import default_prompt_config

        config = default_prompt_config()
    bundle = assemble_prompt(rx, config)
    text = backend.complete(bundle)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return text, Provenance(
        backend=backend.name, timestamp=stamp, prompt_digest=bundle.digest
    )
