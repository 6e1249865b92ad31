"""Deterministic plan executors: toy tool-use registries and arithmetic answers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

from .actions import DEFAULT_FINISH_TOKEN, ActionRecord, strip_quotes


@dataclass(frozen=True)
class Verdict:
    success: bool
    reason: str = ""

    def __bool__(self):
        return self.success


SUCCESS = Verdict(True)


class Environment(Protocol):
    def is_terminal(self, path: Sequence[ActionRecord]) -> bool: ...

    def verify(self, path: Sequence[ActionRecord]) -> Verdict: ...


@dataclass(frozen=True)
class ToolSpec:
    params: tuple[str, ...] = ()
    sets: tuple[tuple[str, str], ...] = ()

    @classmethod
    def from_json(cls, spec) -> ToolSpec:
        if isinstance(spec, list):
            return cls(tuple(spec))
        return cls(tuple(spec.get("params", [])), tuple(spec.get("sets", {}).items()))


@dataclass(frozen=True)
class ToyToolEnv:
    """Replays tool calls against a registry, ordering rules and a goal state.

    ``sets`` values starting with ``$`` copy the named argument into the
    state; anything else is stored literally.
    """

    registry: dict[str, ToolSpec]
    rules: tuple[tuple[str, str], ...] = ()
    goal: dict[str, str] = field(default_factory=dict)
    finish_token: str = DEFAULT_FINISH_TOKEN

    def __post_init__(self):
        deps: dict[str, set[str]] = {}
        for pre, dep in self.rules:
            deps.setdefault(dep, set()).add(pre)
        visiting, done = set(), set()

        def visit(tool):
            if tool in done:
                return
            if tool in visiting:
                raise ValueError(f"dependency cycle through {tool!r}")
            visiting.add(tool)
            for pre in deps.get(tool, ()):
                visit(pre)
            visiting.discard(tool)
            done.add(tool)

        for tool in list(deps):
            visit(tool)
        settable = {k for spec in self.registry.values() for k, _ in spec.sets}
        if not set(self.goal) <= settable:
            raise ValueError(f"goal keys {sorted(set(self.goal) - settable)} cannot be set by any tool")

    @classmethod
    def from_json(cls, registry: dict, rules=(), goal=None, finish_token=DEFAULT_FINISH_TOKEN) -> ToyToolEnv:
        return cls({name: ToolSpec.from_json(s) for name, s in registry.items()},
                   tuple(tuple(r) for r in rules),
                   {k: str(v) for k, v in (goal or {}).items()},
                   finish_token)

    def is_terminal(self, path: Sequence[ActionRecord]) -> bool:
        return bool(path) and path[-1].is_finish

    def tool_docs(self) -> str:
        lines = [f"{name}({', '.join(spec.params)})" for name, spec in self.registry.items()]
        lines += [f"{pre} must be called before {dep}" for pre, dep in self.rules]
        return "\n".join(lines + [f"{self.finish_token}() ends the plan"])

    def replay(self, path: Sequence[ActionRecord]) -> tuple[dict[str, str], Verdict]:
        state: dict[str, str] = {}
        called: set[str] = set()
        prereqs: dict[str, set[str]] = {}
        for pre, dep in self.rules:
            prereqs.setdefault(dep, set()).add(pre)
        for action in path:
            if action.is_finish:
                break
            spec = self.registry.get(action.tool_name)
            if spec is None:
                return state, Verdict(False, "unknown_api")
            values = {}
            if len(action.args) != len(spec.params):
                return state, Verdict(False, "bad_args")
            for i, (name, value) in enumerate(action.args):
                if name and name not in spec.params:
                    return state, Verdict(False, "bad_args")
                values[name or spec.params[i]] = strip_quotes(value)
            if len(values) != len(spec.params):
                return state, Verdict(False, "bad_args")
            if not prereqs.get(action.tool_name, set()) <= called:
                return state, Verdict(False, "order_violation")
            called.add(action.tool_name)
            for key, src in spec.sets:
                state[key] = values[src[1:]] if src.startswith("$") else src
        return state, SUCCESS

    def verify(self, path: Sequence[ActionRecord]) -> Verdict:
        state, verdict = self.replay(path)
        if not verdict:
            return verdict
        if any(state.get(k) != v for k, v in self.goal.items()):
            return Verdict(False, "goal_unmet")
        return SUCCESS


def toy_verify(path: Sequence[ActionRecord], env: ToyToolEnv) -> Verdict:
    return env.verify(path)


@dataclass(frozen=True)
class ArithmeticEnv:
    """Reasoning-step tasks judged only on the final ``Finish(answer=...)``."""

    question: str
    ground_truth: Fraction
    answer_arg: str = "answer"
    finish_token: str = DEFAULT_FINISH_TOKEN
    rel_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "ground_truth", Fraction(self.ground_truth))

    def is_terminal(self, path: Sequence[ActionRecord]) -> bool:
        return bool(path) and path[-1].is_finish

    def extract(self, action: ActionRecord) -> Fraction | None:
        raw = strip_quotes(action.arg(self.answer_arg))
        if raw is None:
            return None
        try:
            return Fraction(raw.replace(",", "").strip())
        except (ValueError, ZeroDivisionError):
            return None

    def verify(self, path: Sequence[ActionRecord]) -> Verdict:
        if not path or not path[-1].is_finish:
            return Verdict(False, "not_finished")
        answer = self.extract(path[-1])
        if answer is None:
            return Verdict(False, "unparseable_answer")
        tol = Fraction(self.rel_tol) * max(1, abs(self.ground_truth))
        if abs(answer - self.ground_truth) <= tol:
            return SUCCESS
        return Verdict(False, "wrong_answer")


def arithmetic_verify(path: Sequence[ActionRecord], env: ArithmeticEnv) -> Verdict:
    return env.verify(path)
