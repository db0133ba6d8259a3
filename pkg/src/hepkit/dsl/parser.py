"""Tokenizer and recursive-descent parser for program sources.

The surface syntax is whitespace-insensitive and supports ``#`` line
comments.  Parsing never throws on bad input mid-stream; errors are
collected as :class:`Diagnostic` records with line and column, and
:func:`parse_program` raises a single :class:`ProgramSyntaxError`
carrying the full list.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    All,
    Any,
    Atom,
    Count,
    Fallback,
    Grasp,
    HandAt,
    Hold,
    JointAngle,
    ObjectAt,
    Predicate,
    Program,
    Release,
    Rest,
    SceneDecl,
    Step,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<badstring>"(?:[^"\\\n]|\\.)*)
  | (?P<num>-?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),:])
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int
    col: int
    step_index: int | None = None

    def render(self) -> str:
        where = f"{self.line}:{self.col}"
        if self.step_index is not None:
            return f"{where}: [{self.code}] step {self.step_index}: {self.message}"
        return f"{where}: [{self.code}] {self.message}"


class ProgramSyntaxError(ValueError):
    """Source could not be parsed into a valid program."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str  # "string" | "num" | "dur" | "ident" | "punct" | "eof"
    text: str
    value: object
    line: int
    col: int
    is_int: bool = False


def _unescape(raw: str, line: int, col: int, errors: list[Diagnostic]) -> str:
    body = raw[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            esc = body[i + 1] if i + 1 < len(body) else ""
            if esc in _ESCAPES:
                out.append(_ESCAPES[esc])
                i += 2
                continue
            errors.append(
                Diagnostic("BAD_ESCAPE", f"unknown escape '\\{esc}'", line, col + i + 1)
            )
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def tokenize(source: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    errors: list[Diagnostic] = []
    line, line_start = 1, 0
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            errors.append(
                Diagnostic("BAD_CHAR", f"unexpected character {source[pos]!r}", line, col)
            )
            pos += 1
            continue
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "ws" or kind == "comment":
            pass
        elif kind == "string":
            tokens.append(Token("string", text, _unescape(text, line, col, errors), line, col))
        elif kind == "badstring":
            errors.append(Diagnostic("UNTERMINATED_STRING", "unterminated string", line, col))
        elif kind == "num":
            end = m.end()
            is_int = "." not in text and "e" not in text and "E" not in text
            # A trailing bare "s" turns a number into a duration literal.
            if end < n and source[end] == "s" and not (
                end + 1 < n and (source[end + 1].isalnum() or source[end + 1] == "_")
            ):
                tokens.append(Token("dur", text + "s", float(text), line, col))
                m = None
                pos = end + 1
                newlines = text.count("\n")
                continue
            tokens.append(Token("num", text, float(text), line, col, is_int=is_int))
        elif kind == "ident":
            tokens.append(Token("ident", text, text, line, col))
        elif kind == "punct":
            tokens.append(Token("punct", text, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", None, line, n - line_start + 1))
    return tokens, errors


_ATOM_NAMES = ("joint_angle", "hand_at", "grasp", "release", "object_at", "rest")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.errors: list[Diagnostic] = []

    # -- token helpers ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def error(self, code: str, message: str, tok: Token | None = None) -> None:
        tok = tok or self.peek()
        self.errors.append(Diagnostic(code, message, tok.line, tok.col))

    def expect_keyword(self, word: str) -> bool:
        if self.at_keyword(word):
            self.advance()
            return True
        self.error("EXPECTED_KEYWORD", f"expected '{word}', found {self.peek().text!r}")
        return False

    def expect_punct(self, ch: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == ch:
            self.advance()
            return True
        self.error("EXPECTED_PUNCT", f"expected '{ch}', found {tok.text!r}")
        return False

    def expect_string(self) -> str | None:
        tok = self.peek()
        if tok.kind == "string":
            self.advance()
            return tok.value  # type: ignore[return-value]
        self.error("EXPECTED_STRING", f"expected quoted string, found {tok.text!r}")
        return None

    def expect_ident(self, what: str) -> str | None:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            return tok.text
        self.error("EXPECTED_IDENT", f"expected {what}, found {tok.text!r}")
        return None

    def expect_num(self) -> float | None:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return tok.value  # type: ignore[return-value]
        self.error("EXPECTED_NUMBER", f"expected number, found {tok.text!r}")
        return None

    def expect_int(self, what: str) -> int | None:
        tok = self.peek()
        if tok.kind == "num" and tok.is_int:
            self.advance()
            return int(tok.value)  # type: ignore[arg-type]
        self.error("EXPECTED_INT", f"expected integer {what}, found {tok.text!r}")
        return None

    def expect_dur(self) -> float | None:
        tok = self.peek()
        if tok.kind == "dur":
            self.advance()
            return tok.value  # type: ignore[return-value]
        self.error("EXPECTED_DURATION", f"expected duration like '3s', found {tok.text!r}")
        return None

    def skip_to_next_clause(self) -> None:
        """After an error, resync at the next scene/step or EOF."""
        while True:
            tok = self.peek()
            if tok.kind == "eof" or (tok.kind == "ident" and tok.text in ("scene", "step")):
                return
            self.advance()

    # -- grammar ----------------------------------------------------------

    def parse(self) -> Program | None:
        if not self.expect_keyword("program"):
            self.skip_to_next_clause()
            name = ""
        else:
            name = self.expect_string() or ""
        scene: list[SceneDecl] = []
        while self.at_keyword("scene"):
            decl = self.parse_scene()
            if decl is not None:
                scene.append(decl)
        steps: list[Step] = []
        while self.at_keyword("step"):
            step = self.parse_step()
            if step is not None:
                steps.append(step)
        tok = self.peek()
        if tok.kind != "eof":
            self.error("TRAILING_INPUT", f"unexpected {tok.text!r} after last step", tok)
        if not steps and not self.errors:
            self.error("EMPTY_PROGRAM", "program has no steps", tok)
        if self.errors:
            return None
        return Program(name=name, scene=tuple(scene), steps=tuple(steps))

    def parse_scene(self) -> SceneDecl | None:
        self.advance()  # "scene"
        kind_tok = self.peek()
        kind = self.expect_ident("scene kind")
        if kind not in ("target", "object", "joint"):
            self.error("BAD_SCENE_KIND", f"scene kind must be target, object, or joint", kind_tok)
            self.skip_to_next_clause()
            return None
        ident = self.expect_ident(f"{kind} name")
        if ident is None:
            self.skip_to_next_clause()
            return None
        position = None
        if kind != "joint" and self.at_keyword("at"):
            self.advance()
            ok = self.expect_punct("(")
            x = self.expect_num()
            ok = self.expect_punct(",") and ok
            y = self.expect_num()
            ok = self.expect_punct(",") and ok
            z = self.expect_num()
            ok = self.expect_punct(")") and ok
            if not ok or x is None or y is None or z is None:
                self.skip_to_next_clause()
                return None
            position = (x, y, z)
        elif kind == "joint" and self.at_keyword("at"):
            self.error("JOINT_POSITION", "joint declarations take no position")
            self.skip_to_next_clause()
            return None
        return SceneDecl(kind=kind, ident=ident, position=position)

    def parse_step(self) -> Step | None:
        self.advance()  # "step"
        index = self.expect_int("step index")
        if index is None or not self.expect_punct(":") or not self.expect_keyword("say"):
            self.skip_to_next_clause()
            return None
        utterance = self.expect_string()
        if utterance is None:
            self.skip_to_next_clause()
            return None
        monitor = None
        timeout = None
        fallback = None
        if self.at_keyword("expect"):
            monitor, timeout = self.parse_expect()
        if self.at_keyword("on"):
            fallback = self.parse_fallback()
            if self.at_keyword("on"):
                self.error("NESTED_FALLBACK", "a step may carry at most one fallback")
                self.skip_to_next_clause()
                return None
        return Step(index=index, utterance=utterance, monitor=monitor,
                    timeout=timeout, fallback=fallback)

    def parse_expect(self) -> tuple[Predicate | None, float | None]:
        self.advance()  # "expect"
        self.expect_keyword("within")
        timeout = self.expect_dur()
        self.expect_punct(":")
        pred = self.parse_predicate(depth=1)
        return pred, timeout

    def parse_fallback(self) -> Fallback | None:
        self.advance()  # "on"
        if not self.expect_keyword("timeout"):
            self.skip_to_next_clause()
            return None
        self.expect_punct(":")
        if not self.expect_keyword("say"):
            self.skip_to_next_clause()
            return None
        utterance = self.expect_string()
        if utterance is None or not self.expect_keyword("expect"):
            self.skip_to_next_clause()
            return None
        self.expect_keyword("within")
        timeout = self.expect_dur()
        self.expect_punct(":")
        pred = self.parse_predicate(depth=1)
        if pred is None or timeout is None:
            return None
        return Fallback(utterance=utterance, monitor=pred, timeout=timeout)

    def parse_predicate(self, depth: int) -> Predicate | None:
        tok = self.peek()
        if tok.kind != "ident":
            self.error("EXPECTED_PREDICATE", f"expected predicate, found {tok.text!r}")
            return None
        word = tok.text
        if word in ("all", "any"):
            self.advance()
            self.expect_punct("(")
            items: list[Predicate] = []
            first = self.parse_predicate(depth + 1)
            if first is not None:
                items.append(first)
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.advance()
                nxt = self.parse_predicate(depth + 1)
                if nxt is not None:
                    items.append(nxt)
            self.expect_punct(")")
            if not items:
                return None
            return All(tuple(items)) if word == "all" else Any(tuple(items))
        if word == "hold":
            self.advance()
            self.expect_punct("(")
            atom = self.parse_atom()
            self.expect_punct(",")
            seconds = self.expect_dur()
            self.expect_punct(")")
            if atom is None or seconds is None:
                return None
            return Hold(atom=atom, seconds=seconds)
        if word == "count":
            self.advance()
            self.expect_punct("(")
            atom = self.parse_atom()
            self.expect_punct(",")
            times = self.expect_int("repetition count")
            self.expect_punct(")")
            if atom is None or times is None:
                return None
            return Count(atom=atom, times=times)
        return self.parse_atom()

    def parse_atom(self) -> Atom | None:
        tok = self.peek()
        if tok.kind != "ident" or tok.text not in _ATOM_NAMES:
            self.error("EXPECTED_ATOM", f"expected monitor atom, found {tok.text!r}")
            return None
        name = tok.text
        self.advance()
        self.expect_punct("(")
        atom: Atom | None = None
        if name == "joint_angle":
            joint = self.expect_ident("joint name")
            self.expect_punct(",")
            lo = self.expect_num()
            self.expect_punct(",")
            hi = self.expect_num()
            if None not in (joint, lo, hi):
                atom = JointAngle(joint, lo, hi)  # type: ignore[arg-type]
        elif name == "hand_at":
            target = self.expect_ident("target name")
            self.expect_punct(",")
            radius = self.expect_num()
            if None not in (target, radius):
                atom = HandAt(target, radius)  # type: ignore[arg-type]
        elif name == "grasp":
            obj = self.expect_ident("object name")
            if obj is not None:
                atom = Grasp(obj)
        elif name == "release":
            obj = self.expect_ident("object name")
            if obj is not None:
                atom = Release(obj)
        elif name == "object_at":
            obj = self.expect_ident("object name")
            self.expect_punct(",")
            target = self.expect_ident("target name")
            self.expect_punct(",")
            radius = self.expect_num()
            if None not in (obj, target, radius):
                atom = ObjectAt(obj, target, radius)  # type: ignore[arg-type]
        elif name == "rest":
            joint = self.expect_ident("joint name")
            self.expect_punct(",")
            seconds = self.expect_dur()
            if None not in (joint, seconds):
                atom = Rest(joint, seconds)  # type: ignore[arg-type]
        self.expect_punct(")")
        return atom


def parse_source(source: str) -> tuple[Program | None, list[Diagnostic]]:
    """Parse without semantic checks. Returns (program, diagnostics)."""
    tokens, lex_errors = tokenize(source)
    parser = _Parser(tokens)
    program = parser.parse()
    diagnostics = lex_errors + parser.errors
    if diagnostics:
        return None, diagnostics
    return program, []


def parse_program(source: str) -> Program:
    """Parse and fully validate a program source.

    Raises :class:`ProgramSyntaxError` carrying every collected diagnostic
    (syntactic and semantic) when the source is not a valid program.
    """
    from .validate import validate_semantics

    program, diagnostics = parse_source(source)
    if program is not None:
        diagnostics = validate_semantics(program)
    if diagnostics:
        raise ProgramSyntaxError(diagnostics)
    assert program is not None
    return program
