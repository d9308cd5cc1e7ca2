"""Text format for timed automata and the command line front end.

A model file holds one directive per line: a single ``clocks`` line, one
``state`` line per control state (exactly one marked ``initial``), and
``trans`` lines whose guards are conjunctions of atomic clock comparisons.
``==`` is syntactic sugar for the conjunction of ``<=`` and ``>=``.  Names
must be declared before they are used, ``#`` starts a comment, and files are
read as UTF-8.  The printer emits a canonical form that parses back to the
same automaton.
"""

from __future__ import annotations

import argparse
import random
import re
import sys
from pathlib import Path

from luzone.automaton import Automaton, GuardAtom, LuBounds, Rel, Transition
from luzone.alu import alu_includes
from luzone.explorer import (
    BudgetExceededError,
    Inclusion,
    SearchOrder,
    reachability,
)

__all__ = [
    "ModelSyntaxError",
    "parse_model",
    "print_model",
    "cli_main",
]


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"->|&&|<=|>=|==|<|>|[A-Za-z_][A-Za-z0-9_]*|-?\d+|\S")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = {
    "clocks",
    "state",
    "trans",
    "guard",
    "reset",
    "initial",
    "accepting",
}
_RELS = {"<": Rel.LT, "<=": Rel.LE, ">=": Rel.GE, ">": Rel.GT}


def _tokenize(line: str) -> list[tuple[str, int]]:
    code = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(code)]


class _Cursor:
    """Token stream over one line, with positioned errors."""

    def __init__(self, tokens: list[tuple[str, int]], lineno: int, line_len: int):
        self.tokens = tokens
        self.lineno = lineno
        self.line_len = line_len
        self.pos = 0

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def take(self) -> tuple[str, int]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message: str) -> "ModelSyntaxError":
        column = (
            self.tokens[self.pos][1]
            if self.pos < len(self.tokens)
            else self.line_len + 1
        )
        return ModelSyntaxError(message, self.lineno, column)

    def expect_name(self, what: str) -> tuple[str, int]:
        token = self.peek()
        if token is None or not _NAME.match(token) or token in _KEYWORDS:
            raise self.fail(f"expected {what}")
        return self.take()


class _Parser:
    def __init__(self) -> None:
        self.clock_names: list[str] = []
        self.clock_index: dict[str, int] = {}
        self.state_names: list[str] = []
        self.state_index: dict[str, int] = {}
        self.initial: int | None = None
        self.accepting: set[int] = set()
        self.transitions: list[Transition] = []
        self.saw_clocks = False

    def parse(self, text: str) -> Automaton:
        lineno = 0
        for lineno, raw in enumerate(text.splitlines(), start=1):
            tokens = _tokenize(raw)
            if not tokens:
                continue
            cursor = _Cursor(tokens, lineno, len(raw))
            directive, column = cursor.take()
            if directive == "clocks":
                self._parse_clocks(cursor)
            elif directive == "state":
                self._parse_state(cursor)
            elif directive == "trans":
                self._parse_trans(cursor)
            else:
                raise ModelSyntaxError(
                    f"unknown directive {directive!r}", lineno, column
                )
        final_line = max(lineno, 1)
        if not self.saw_clocks:
            raise ModelSyntaxError("no clocks directive", final_line)
        if self.initial is None:
            raise ModelSyntaxError("no initial state", final_line)
        return Automaton(
            state_names=tuple(self.state_names),
            clock_names=tuple(self.clock_names),
            initial=self.initial,
            accepting=frozenset(self.accepting),
            transitions=tuple(self.transitions),
        )

    def _parse_clocks(self, cursor: _Cursor) -> None:
        if self.saw_clocks:
            raise cursor.fail("duplicate clocks directive")
        self.saw_clocks = True
        while cursor.peek() is not None:
            name, column = cursor.expect_name("clock name")
            if name in self.clock_index:
                raise ModelSyntaxError(
                    f"duplicate clock {name!r}", cursor.lineno, column
                )
            self.clock_names.append(name)
            self.clock_index[name] = len(self.clock_names)
        if not self.clock_names:
            raise cursor.fail("expected clock name")

    def _parse_state(self, cursor: _Cursor) -> None:
        name, column = cursor.expect_name("state name")
        if name in self.state_index:
            raise ModelSyntaxError(f"duplicate state {name!r}", cursor.lineno, column)
        index = len(self.state_names)
        self.state_names.append(name)
        self.state_index[name] = index
        while cursor.peek() is not None:
            flag, column = cursor.take()
            if flag == "initial":
                if self.initial is not None:
                    raise ModelSyntaxError(
                        "duplicate initial state", cursor.lineno, column
                    )
                self.initial = index
            elif flag == "accepting":
                self.accepting.add(index)
            else:
                raise ModelSyntaxError(
                    f"unknown state attribute {flag!r}", cursor.lineno, column
                )

    def _lookup_state(self, cursor: _Cursor) -> int:
        name, column = cursor.expect_name("state name")
        if name not in self.state_index:
            raise ModelSyntaxError(f"unknown state {name!r}", cursor.lineno, column)
        return self.state_index[name]

    def _lookup_clock(self, cursor: _Cursor) -> int:
        name, column = cursor.expect_name("clock name")
        if name not in self.clock_index:
            raise ModelSyntaxError(f"unknown clock {name!r}", cursor.lineno, column)
        return self.clock_index[name]

    def _parse_trans(self, cursor: _Cursor) -> None:
        if not self.saw_clocks:
            raise cursor.fail("clocks must be declared before transitions")
        source = self._lookup_state(cursor)
        if cursor.peek() != "->":
            raise cursor.fail("expected '->'")
        cursor.take()
        target = self._lookup_state(cursor)
        guard: list[GuardAtom] = []
        resets: set[int] = set()
        while cursor.peek() is not None:
            keyword, column = cursor.take()
            if keyword == "guard":
                guard.extend(self._parse_guard(cursor))
            elif keyword == "reset":
                if cursor.peek() is None:
                    raise cursor.fail("expected clock name")
                while cursor.peek() not in (None, "guard", "reset"):
                    resets.add(self._lookup_clock(cursor))
            else:
                raise ModelSyntaxError(
                    f"unexpected token {keyword!r}", cursor.lineno, column
                )
        self.transitions.append(
            Transition(source, target, guard=tuple(guard), resets=frozenset(resets))
        )

    def _parse_guard(self, cursor: _Cursor) -> list[GuardAtom]:
        atoms = [self._parse_atom(cursor)]
        while cursor.peek() == "&&":
            cursor.take()
            atoms.append(self._parse_atom(cursor))
        return [piece for atom in atoms for piece in atom]

    def _parse_atom(self, cursor: _Cursor) -> list[GuardAtom]:
        clock = self._lookup_clock(cursor)
        op = cursor.peek()
        if op not in ("<", "<=", "==", ">=", ">"):
            raise cursor.fail("expected comparison operator")
        cursor.take()
        token = cursor.peek()
        if token is None or not re.fullmatch(r"-?\d+", token):
            raise cursor.fail("expected integer constant")
        _, column = cursor.take()
        value = int(token)
        if value < 0:
            raise ModelSyntaxError(
                f"negative constant {value}", cursor.lineno, column
            )
        if op == "==":
            return [GuardAtom(clock, Rel.LE, value), GuardAtom(clock, Rel.GE, value)]
        return [GuardAtom(clock, _RELS[op], value)]


def parse_model(text: str) -> Automaton:
    """Parse model text into an automaton, or raise ModelSyntaxError."""
    return _Parser().parse(text)


def print_model(automaton: Automaton) -> str:
    """Canonical text for an automaton; parsing it back gives an equal one."""
    lines = ["clocks " + " ".join(automaton.clock_names)]
    for index, name in enumerate(automaton.state_names):
        line = f"state {name}"
        if index == automaton.initial:
            line += " initial"
        if index in automaton.accepting:
            line += " accepting"
        lines.append(line)
    for transition in automaton.transitions:
        line = (
            f"trans {automaton.state_names[transition.source]}"
            f" -> {automaton.state_names[transition.target]}"
        )
        if transition.guard:
            atoms = " && ".join(
                f"{automaton.clock_names[a.clock - 1]} {a.rel.value} {a.const}"
                for a in transition.guard
            )
            line += f" guard {atoms}"
        if transition.resets:
            names = " ".join(
                automaton.clock_names[c - 1] for c in sorted(transition.resets)
            )
            line += f" reset {names}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _run_check(args: argparse.Namespace) -> int:
    try:
        text = Path(args.model).read_text(encoding="utf-8")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        automaton = parse_model(text)
    except ModelSyntaxError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        result = reachability(
            automaton,
            inclusion=Inclusion(args.inclusion),
            search_order=SearchOrder(args.search),
            trace=args.trace,
            budget=args.budget,
        )
    except BudgetExceededError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    verdict = "REACHABLE" if result.reachable else "UNREACHABLE"
    print(verdict)
    if args.stats:
        print(result.summary_line())
    if args.trace and result.trace is not None:
        numbers = {t: k for k, t in enumerate(automaton.transitions, start=1)}
        for transition in result.trace:
            print(
                f"{automaton.state_names[transition.source]}"
                f" --transition#{numbers[transition]}-->"
                f" {automaton.state_names[transition.target]}"
            )
    if args.expect is not None and args.expect != verdict.lower():
        print(f"error: expected {args.expect}, got {verdict.lower()}", file=sys.stderr)
        return 1
    return 0


def _random_lu(rng: random.Random, n_clocks: int) -> LuBounds:
    consts = (None, 0, 1, 2, 3)
    return LuBounds.from_pairs(
        tuple(rng.choice(consts) for _ in range(n_clocks)),
        tuple(rng.choice(consts) for _ in range(n_clocks)),
    )


def _run_oracle_check(args: argparse.Namespace) -> int:
    from luzone.oracles import (
        ZoneRecipe,
        alu_member_mask,
        grid_points,
        grid_resolution,
        member_mask,
    )

    rng = random.Random(args.seed)
    n = args.clocks
    denom = grid_resolution(n)
    max_const = 3
    points = grid_points(n, max_const, denom)
    for iteration in range(args.iters):
        zone = ZoneRecipe.random(rng.randrange(2**30), n, max_const).build()
        zp = ZoneRecipe.random(rng.randrange(2**30), n, max_const).build()
        lu = _random_lu(rng, n)
        claimed = alu_includes(zone, zp, lu)
        holds = not (member_mask(zone, points, denom) & ~alu_member_mask(zp, lu, points, denom)).any()
        if claimed != holds:
            print(f"disagreement at iteration {iteration} (seed {args.seed}):")
            print(f"inclusion test says {claimed}, grid oracle says {holds}")
            print(f"L={lu.lower} U={lu.upper}")
            print("zone Z:")
            print(zone.pretty())
            print("zone Z':")
            print(zp.pretty())
            return 1
    print(f"ok: {args.iters} zone pairs checked, no disagreements (seed={args.seed})")
    return 0


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="luzone",
        description="Zone-based reachability for timed automata.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="decide reachability for a model file")
    check.add_argument("model", help="path to a .ta model file")
    check.add_argument(
        "--inclusion",
        choices=["none", "subset", "alu"],
        default="alu",
        help="subsumption between stored zones (default: alu)",
    )
    check.add_argument(
        "--search", choices=["bfs", "dfs"], default="bfs", help="exploration order"
    )
    check.add_argument("--trace", action="store_true", help="print a witness run")
    check.add_argument("--stats", action="store_true", help="print search statistics")
    check.add_argument("--budget", type=int, default=100_000, help="node budget")
    check.add_argument(
        "--expect",
        choices=["reachable", "unreachable"],
        help="fail with exit code 1 unless the verdict matches",
    )

    oracle = commands.add_parser(
        "oracle-check", help="compare the inclusion test against a grid oracle"
    )
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--clocks", type=int, default=2)
    oracle.add_argument("--iters", type=int, default=200)

    args = parser.parse_args(argv)
    if args.command == "check":
        return _run_check(args)
    return _run_oracle_check(args)
