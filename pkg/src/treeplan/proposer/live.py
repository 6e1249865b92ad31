"""OpenAI-style chat-completions backend."""
from __future__ import annotations

import logging
import os
import time
from typing import Callable, Sequence

import httpx

from ..actions import ActionRecord, try_canonicalize
from ..errors import BackendUnavailable, BudgetExceeded, HttpStatus
from .base import ProposalBatch, ProposerConfig, batch_or_raise, group_equivalent

log = logging.getLogger(__name__)

ENV_URL = "OPENAI_API_BASE"
ENV_MODEL = "OPENAI_MODEL"
ENV_TOKEN = "OPENAI_API_KEY"
DEFAULT_URL = "https://api.openai.com/v1"

RETRY_STATUS = {408, 409, 429, 500, 502, 503, 504}


class ChatClient:
    """Minimal chat-completions client with retry/backoff and a call budget.

    ``calls`` counts requests that were attempted (one per
    :meth:`complete`, regardless of retries).
    """

    def __init__(self, base_url: str, model: str, api_key: str = "", *,
                 timeout: float = 60.0, max_retries: int = 3, backoff: float = 1.0,
                 call_budget: int | None = None,
                 transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.max_retries = max_retries
        self.backoff = backoff
        self.call_budget = call_budget
        self.calls = 0
        self._sleep = sleep
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    @classmethod
    def from_env(cls, **kwargs) -> ChatClient:
        model = os.environ.get(ENV_MODEL, "").strip()
        if not model:
            raise BackendUnavailable(f"{ENV_MODEL} is not set")
        url = os.environ.get(ENV_URL, "").strip() or DEFAULT_URL
        return cls(url, model, os.environ.get(ENV_TOKEN, "").strip(), **kwargs)

    def close(self):
        self._http.close()

    def complete(self, messages: list[dict], n: int = 1, temperature: float = 1.0) -> list[str]:
        if self.call_budget is not None and self.calls >= self.call_budget:
            raise BudgetExceeded(f"call budget of {self.call_budget} exhausted")
        self.calls += 1
        payload = {"model": self.model, "messages": messages, "temperature": temperature, "n": n}
        url = f"{self.base_url}/chat/completions"
        last: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._http.post(url, json=payload)
            except httpx.HTTPError as exc:
                last = BackendUnavailable(f"{type(exc).__name__}: {exc}")
                log.warning("chat request failed (attempt %d): %s", attempt + 1, exc)
                continue
            if resp.status_code == 200:
                data = resp.json()
                return [c["message"]["content"] or "" for c in data.get("choices", [])]
            last = HttpStatus(resp.status_code, resp.text)
            if resp.status_code not in RETRY_STATUS:
                break
            log.warning("chat request got HTTP %d (attempt %d)", resp.status_code, attempt + 1)
        raise last


def _first_action_line(text: str) -> str:
    for line in text.splitlines():
        line = line.strip().strip("`")
        if not line:
            continue
        for prefix in ("Action:", "action:", "Next action:"):
            if line.startswith(prefix):
                line = line[len(prefix):].strip()
        return line
    return ""


class LiveProposer:
    """Proposer backed by a :class:`ChatClient`; one HTTP call per operation."""

    def __init__(self, client: ChatClient, cfg: ProposerConfig | None = None,
                 tool_docs: str = "", demonstrations: str = ""):
        self.client = client
        self.cfg = cfg or ProposerConfig()
        self.tool_docs = tool_docs
        self.demonstrations = demonstrations

    @property
    def calls(self) -> int:
        return self.client.calls

    def prompt(self, task: str, history: Sequence[ActionRecord]) -> str:
        hist = "\n".join(f"{i}. {a.canonical_key}" for i, a in enumerate(history, 1)) or "(none)"
        return self.cfg.prompt_template.format(
            tool_docs=self.tool_docs, demonstrations=self.demonstrations, task=task, history=hist)

    def propose_next(self, task: str, history: Sequence[ActionRecord]) -> ProposalBatch:
        messages = [{"role": "user", "content": self.prompt(task, history)}]
        texts = self.client.complete(messages, n=self.cfg.k, temperature=self.cfg.temperature)
        samples = [_first_action_line(t) for t in texts]
        samples += [""] * (self.cfg.k - len(samples))
        return batch_or_raise(group_equivalent(samples, k=self.cfg.k, finish_token=self.cfg.finish_token))

    def imagine_completion(self, task: str, history: Sequence[ActionRecord]) -> list[ActionRecord]:
        content = (self.prompt(task, history)
                   + "\n\nInstead of one action, write every remaining action needed to finish"
                     " the task, one per line, ending with the finish action.")
        texts = self.client.complete([{"role": "user", "content": content}], n=1,
                                     temperature=self.cfg.temperature)
        out: list[ActionRecord] = []
        for line in (texts[0] if texts else "").splitlines():
            a = try_canonicalize(_first_action_line(line).lstrip("0123456789.) "), self.cfg.finish_token)
            if a is None:
                continue
            out.append(a)
            if a.is_finish or len(out) >= self.cfg.max_imagined_steps:
                break
        return out
