"""Instance text files and result JSON.

Instance format (ASCII, LF)::

    n m C
    p_1 s_1
    ...
    p_n s_n
"""

from __future__ import annotations

from dataclasses import asdict

from .. import __version__
from ..errors import InstanceError, ParseError
from ..model import Instance, validate_instance


def format_instance(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.machines} {inst.capacity}"]
    lines += [f"{job.p} {job.s}" for job in inst.jobs]
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    rows = [(no, line.split()) for no, line in enumerate(text.splitlines(), start=1)]
    rows = [(no, parts) for no, parts in rows if parts]
    if not rows:
        raise ParseError(1, "empty instance file")

    def ints(no, parts, count):
        if len(parts) != count:
            raise ParseError(no, f"expected {count} integers, got {len(parts)}")
        try:
            return [int(x) for x in parts]
        except ValueError:
            raise ParseError(no, "non-integer value") from None

    no, parts = rows[0]
    n, m, cap = ints(no, parts, 3)
    body = rows[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (body[-1][0] + 1 if body else 2)
        raise ParseError(where, f"header announces {n} jobs, file has {len(body)}")
    jobs = [tuple(ints(no, parts, 2)) for no, parts in body]
    try:
        return validate_instance(jobs, cap, m)
    except InstanceError:
        raise
    except ValueError as exc:
        raise ParseError(1, str(exc)) from None


def read_instance(path) -> Instance:
    with open(path, encoding="ascii") as fh:
        return parse_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_instance(inst))


def result_to_dict(result, inst: Instance, config=None, pr=None) -> dict:
    out = asdict(result)
    out["schedule"] = result.schedule.to_lists() if result.schedule is not None else None
    out["instance"] = {"n": inst.n, "machines": inst.machines, "capacity": inst.capacity}
    if pr is not None:
        out["pr"] = pr
        out["cg_lb_over_pr"] = result.cg_lb / pr if result.cg_lb is not None and pr > 0 else None
    out["solver_version"] = __version__
    if config is not None:
        out["config"] = asdict(config)
    return out
