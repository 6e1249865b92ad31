"""Action records and the canonical form used for action equality."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError

DEFAULT_FINISH_TOKEN = "Finish"

_WS = re.compile(r"\s+")
_CALL = re.compile(r"^([A-Za-z_][\w.]*)?\s*\((.*)\)$", re.S)
_KWARG = re.compile(r"^([A-Za-z_]\w*)\s*=\s*(.*)$", re.S)


@dataclass(frozen=True, eq=False)
class ActionRecord:
    tool_name: str
    args: tuple[tuple[str, str], ...]
    raw_text: str
    canonical_key: str = field(compare=False)
    is_finish: bool = False

    def __eq__(self, other):
        if not isinstance(other, ActionRecord):
            return NotImplemented
        return self.canonical_key == other.canonical_key

    def __hash__(self):
        return hash(self.canonical_key)

    def __str__(self):
        return self.canonical_key

    def arg(self, name: str, index: int = 0) -> str | None:
        """Value of argument ``name``, falling back to the positional slot ``index``."""
        for n, v in self.args:
            if n == name:
                return v
        if index < len(self.args) and not self.args[index][0]:
            return self.args[index][1]
        return None


def _scan(text: str):
    """Yield (index, char, depth) for characters outside quotes; raise on imbalance."""
    depth = 0
    quote = None
    for i, ch in enumerate(text):
        if quote:
            if ch == quote:
                quote = None
            continue
        if ch in "'\"":
            quote = ch
            continue
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in {text!r}")
        yield i, ch, depth
    if depth != 0:
        raise ParseError(f"unbalanced parentheses in {text!r}")


def _split_args(body: str) -> list[str]:
    parts, start = [], 0
    for i, ch, depth in _scan(body):
        if ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    return [p.strip() for p in parts]


def _outer_call(text: str) -> re.Match | None:
    m = _CALL.match(text)
    if m is None:
        return None
    # the "(" after the name must close at the final ")", otherwise this is
    # a multi-statement action such as "a(1); b(2)"
    open_at = m.start(2) - 1
    for i, ch, depth in _scan(text):
        if i > open_at and depth == 0 and ch == ")":
            return m if i == len(text) - 1 else None
    return None


def canonicalize_action(raw_text: str, finish_token: str = DEFAULT_FINISH_TOKEN) -> ActionRecord:
    """Parse ``Tool(a=1, b=2)`` / ``Tool(1, 2)`` text into an :class:`ActionRecord`.

    Text that is not a single call (natural-language steps, multi-statement
    code) becomes an opaque action keyed by its whitespace-normalized form.
    """
    if raw_text is None or not raw_text.strip():
        raise ParseError("empty action text")
    text = _WS.sub(" ", raw_text.strip())
    list(_scan(text))  # balance check

    m = _outer_call(text)
    if m is None:
        if text.startswith("("):
            raise ParseError(f"empty tool name in {raw_text!r}")
        return ActionRecord(text, (), raw_text, text, text == finish_token)

    name = m.group(1)
    if not name:
        raise ParseError(f"empty tool name in {raw_text!r}")
    body = m.group(2).strip()
    args = []
    if body:
        for part in _split_args(body):
            if not part:
                raise ParseError(f"empty argument in {raw_text!r}")
            kw = _KWARG.match(part)
            if kw and not kw.group(2).startswith("="):
                args.append((kw.group(1), kw.group(2).strip()))
            else:
                args.append(("", part))
    rendered = ", ".join(f"{n}={v}" if n else v for n, v in args)
    key = f"{name}({rendered})"
    return ActionRecord(name, tuple(args), raw_text, key, name == finish_token)


def try_canonicalize(raw_text: str, finish_token: str = DEFAULT_FINISH_TOKEN) -> ActionRecord | None:
    try:
        return canonicalize_action(raw_text, finish_token)
    except ParseError:
        return None


def strip_quotes(value: str | None) -> str | None:
    if value is not None and len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        return value[1:-1]
    return value
