"""Writer for the CPLEX LP text format (the subset used here).

Layout::

    \\ <title>
    Minimize
     obj: <terms>
    Subject To
     <name>: <terms> <sense> <rhs>
    Bounds
     <lo> <= <var> [<= <hi>]
    Binaries
     <var> ...
    End

Coefficients and right-hand sides are decimal integers, lines end in LF and
long expressions wrap at eight terms per line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_PER_LINE = 8


def _terms(terms: list[tuple[int, str]]) -> list[str]:
    out = []
    for pos, (coef, var) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{mag} {var}"
        if pos == 0:
            out.append(f"- {body}" if coef < 0 else body)
        else:
            out.append(f"{sign} {body}")
    return out


def _wrap(head: str, pieces: list[str]) -> list[str]:
    if not pieces:
        pieces = ["0"]
    lines = []
    for start in range(0, len(pieces), _PER_LINE):
        chunk = " ".join(pieces[start:start + _PER_LINE])
        lines.append((head if start == 0 else " " * len(head)) + chunk)
    return lines


@dataclass
class LinearProgram:
    title: str
    objective: list[tuple[int, str]] = field(default_factory=list)
    constraints: list[tuple[str, list[tuple[int, str]], str, int]] = field(default_factory=list)
    bounds: list[tuple[str, int | None, int | None]] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)

    def add_constraint(self, name, terms, sense, rhs) -> None:
        self.constraints.append((name, list(terms), sense, int(rhs)))

    def render(self) -> str:
        lines = [f"\\ {self.title}", "Minimize"]
        lines += _wrap(" obj: ", _terms(self.objective))
        lines.append("Subject To")
        for name, terms, sense, rhs in self.constraints:
            body = _wrap(f" {name}: ", _terms(terms))
            body[-1] += f" {sense} {rhs}"
            lines += body
        if self.bounds:
            lines.append("Bounds")
            for var, lo, hi in self.bounds:
                if hi is None:
                    lines.append(f" {var} >= {lo}")
                else:
                    lines.append(f" {lo} <= {var} <= {hi}")
        if self.binaries:
            lines.append("Binaries")
            lines += _wrap(" ", self.binaries)
        lines.append("End")
        return "\n".join(lines) + "\n"
