"""Command-line front end.

    crwps [fan|sectors|betti|ring|threepoint|integrate] --weights 2,3,4 [--json] [--seed N]

With no subcommand the full report (fan, sectors, Betti table, ring) is printed.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .cohomology import betti_table, ordinary_ring, poincare_polynomial
from .fan import build_fan, normalize_weights
from .ringops import (
    EquivariantDivisor,
    SectorClass,
    cup_table,
    obstruction_bundle,
    point_class,
    sector_integral,
    three_point_detail,
)
from .sectors import TwistedSector, all_sectors, make_triple

COMMANDS = ("fan", "sectors", "betti", "ring", "threepoint", "integrate", "report")


class UsageError(Exception):
    pass


class UnknownKey(Exception):
    def __init__(self, key, valid):
        super().__init__(key)
        self.key = key
        self.valid = valid


def rat_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s: str) -> Fraction:
    if not isinstance(s, str) or not re.fullmatch(r"-?\d+/\d+", s):
        raise ValueError(f"expected a 'num/den' string, got {s!r}")
    return Fraction(s)


def pretty(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class SectorRow:
    label: str
    key: str
    carrier: tuple[int, ...]
    a: tuple[Fraction, ...]
    quotient_weights: tuple[int, ...]
    iota: Fraction
    dim: int
    d: int

    def to_dict(self):
        return {"label": self.label, "key": self.key, "carrier": list(self.carrier),
                "a": [rat_str(x) for x in self.a], "quotient_weights": list(self.quotient_weights),
                "iota": rat_str(self.iota), "dim": self.dim, "d": self.d}

    @classmethod
    def from_dict(cls, d):
        return cls(d["label"], d["key"], tuple(d["carrier"]), tuple(parse_rat(x) for x in d["a"]),
                   tuple(d["quotient_weights"]), parse_rat(d["iota"]), d["dim"], d["d"])


@dataclass
class Report:
    weights_given: tuple[int, ...]
    weights: tuple[int, ...]
    rays: tuple[tuple[int, ...], ...] | None = None
    c0: tuple[tuple[int, ...], ...] | None = None
    sectors: tuple[SectorRow, ...] | None = None
    betti: tuple[tuple[Fraction, int], ...] | None = None
    betti_lcm: int | None = None
    l_values: tuple[int, ...] | None = None
    e: tuple[tuple[int, int, Fraction], ...] | None = None
    cup: tuple[tuple[str, str, tuple[tuple[str, Fraction], ...]], ...] | None = None
    point_classes: tuple[tuple[int, str, Fraction], ...] | None = None
    result: dict[str, Any] | None = field(default=None)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"weights_given": list(self.weights_given), "weights": list(self.weights)}
        if self.rays is not None:
            out["rays"] = [list(r) for r in self.rays]
            out["c0"] = [list(r) for r in self.c0]
        if self.sectors is not None:
            out["sectors"] = [s.to_dict() for s in self.sectors]
        if self.betti is not None:
            out["betti"] = [{"degree": rat_str(p), "dim": k} for p, k in self.betti]
            out["betti_lcm"] = self.betti_lcm
        if self.l_values is not None:
            out["l_values"] = list(self.l_values)
            out["e"] = [{"i": i, "j": j, "e": rat_str(x)} for i, j, x in self.e]
        if self.cup is not None:
            out["cup"] = [{"a": a, "b": b, "product": [{"basis": c, "coeff": rat_str(x)} for c, x in terms]}
                          for a, b, terms in self.cup]
            out["point_classes"] = [{"ray": i, "basis": b, "coeff": rat_str(x)}
                                    for i, b, x in self.point_classes]
        if self.result is not None:
            out["result"] = {k: rat_str(v) if isinstance(v, Fraction) else v
                             for k, v in self.result.items()}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        r = cls(tuple(d["weights_given"]), tuple(d["weights"]))
        if "rays" in d:
            r.rays = tuple(tuple(x) for x in d["rays"])
            r.c0 = tuple(tuple(x) for x in d["c0"])
        if "sectors" in d:
            r.sectors = tuple(SectorRow.from_dict(s) for s in d["sectors"])
        if "betti" in d:
            r.betti = tuple((parse_rat(x["degree"]), x["dim"]) for x in d["betti"])
            r.betti_lcm = d["betti_lcm"]
        if "l_values" in d:
            r.l_values = tuple(d["l_values"])
            r.e = tuple((x["i"], x["j"], parse_rat(x["e"])) for x in d["e"])
        if "cup" in d:
            r.cup = tuple((x["a"], x["b"], tuple((t["basis"], parse_rat(t["coeff"])) for t in x["product"]))
                          for x in d["cup"])
            r.point_classes = tuple((x["ray"], x["basis"], parse_rat(x["coeff"])) for x in d["point_classes"])
        if "result" in d:
            r.result = {k: parse_rat(v) if k in _RESULT_RATS else v for k, v in d["result"].items()}
        return r

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_RESULT_RATS = {"value"}


# --- argument parsing ------------------------------------------------------

def parse_weights(s: str) -> tuple[int, ...]:
    try:
        q = tuple(int(x) for x in s.split(","))
    except ValueError:
        raise UsageError(f"--weights expects comma-separated positive integers, got {s!r}") from None
    if len(q) < 2 or any(x <= 0 for x in q):
        raise UsageError(f"--weights needs at least two positive integers, got {s!r}")
    return q


def split_top(s: str, sep: str) -> list[str]:
    """Split on ``sep`` outside square brackets."""
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def sector_labels(fan) -> dict[str, TwistedSector]:
    """'1' for the untwisted sector, g1, g2, ... for the census in canonical order."""
    secs = all_sectors(fan)
    out = {"1": secs[0]}
    for i, s in enumerate(secs[1:], 1):
        out[f"g{i}"] = s
    return out


def resolve_sector(fan, name: str) -> TwistedSector:
    labels = sector_labels(fan)
    name = name.strip()
    if name in ("1", "e", "id"):
        return labels["1"]
    if name in labels:
        return labels[name]
    for s in labels.values():
        if s.key == name.replace(" ", ""):
            return s
    raise UnknownKey(name, [f"{lab}  {s.key}" for lab, s in labels.items()])


def parse_class(spec: str, s: TwistedSector) -> SectorClass:
    """A '*'-separated product of: a rational, D[^m], [c1,...][^m] (coefficients
    on the surviving rays in order), or 1."""
    scalar = Fraction(1)
    factors: list[EquivariantDivisor] = []
    for term in split_top(spec, "*"):
        m = re.fullmatch(r"(D|\[[^\]]*\])(?:\^(\d+))?", term)
        if m:
            power = int(m.group(2) or 1)
            if m.group(1) == "D":
                div = EquivariantDivisor.canonical(s.orbit)
            else:
                try:
                    cs = [Fraction(x) for x in m.group(1)[1:-1].split(",")]
                except (ValueError, ZeroDivisionError):
                    raise UsageError(f"bad coefficient vector {term!r}") from None
                if len(cs) != len(s.orbit.survivors):
                    raise UsageError(f"{term!r} needs {len(s.orbit.survivors)} coefficients "
                                     f"(surviving rays {list(s.orbit.survivors)})")
                div = EquivariantDivisor.of(zip(s.orbit.survivors, cs))
            factors += [div] * power
            continue
        try:
            scalar *= Fraction(term)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cannot parse class term {term!r}") from None
    return SectorClass(scalar, tuple(factors))


# --- report sections -------------------------------------------------------

def _label_basis(labels_by_key, b) -> str:
    lab = labels_by_key[b[0]]
    m = b[1]
    if m == 0:
        return lab
    pw = "D" if m == 1 else f"D^{m}"
    return pw if lab == "1" else f"{lab}*{pw}"


def build_report(weights_given, sections, seed=0) -> Report:
    ws = normalize_weights(weights_given)
    fan = build_fan(ws)
    rep = Report(tuple(weights_given), ws.q)
    if "fan" in sections:
        rep.rays = fan.rays
        rep.c0 = tuple(tuple(r) for r in fan.c0.tolist())
    labels = sector_labels(fan)
    if "sectors" in sections:
        rep.sectors = tuple(
            SectorRow(lab, s.key, s.carrier, s.g.coeffs, s.quotient_display(fan.n), s.iota, s.dim, s.d)
            for lab, s in labels.items() if lab != "1")
    if "betti" in sections:
        bt = betti_table(fan)
        rep.betti = tuple(poincare_polynomial(bt))
        rep.betti_lcm = bt.denominator_lcm
    if "ring" in sections:
        ring = ordinary_ring(ws)
        rep.l_values = ring.l
        rep.e = tuple((i, j, x) for (i, j), x in sorted(ring.e.items()))
        by_key = {s.key: lab for lab, s in labels.items()}
        table = cup_table(fan, seed)
        rep.cup = tuple(
            (_label_basis(by_key, a), _label_basis(by_key, b),
             tuple((_label_basis(by_key, c), x) for c, x in terms))
            for (a, b), terms in table.constants.items())
        pcs = []
        for i in range(fan.n + 1):
            ((bk, x),) = point_class(fan, i).items()
            pcs.append((i, _label_basis(by_key, bk), x))
        rep.point_classes = tuple(pcs)
    return rep


def render_text(rep: Report) -> str:
    out = []
    q = ",".join(map(str, rep.weights))
    if rep.weights_given != rep.weights:
        out.append(f"P({','.join(map(str, rep.weights_given))}) normalized to P({q})")
    else:
        out.append(f"P({q})")
    if rep.rays is not None:
        out.append("rays:")
        out += [f"  v{i} = ({', '.join(map(str, r))})" for i, r in enumerate(rep.rays)]
        out.append("C0:")
        out += ["  [" + " ".join(f"{x:>3}" for x in r) + " ]" for r in rep.c0]
    if rep.sectors is not None:
        out.append(f"twisted sectors ({len(rep.sectors)}):")
        for s in rep.sectors:
            qd = ",".join(map(str, s.quotient_weights))
            out.append(f"  {s.label:<4} {s.key:<40} P({qd})  dim {s.dim}  d {s.d}  iota {pretty(s.iota)}")
    if rep.betti is not None:
        out.append(f"orbifold Betti numbers (grading denominator {rep.betti_lcm}):")
        out += [f"  H^{pretty(p)}: {k}" for p, k in rep.betti]
        out.append(f"  total: {sum(k for _, k in rep.betti)}")
    if rep.l_values is not None:
        out.append("ordinary ring: l = (" + ", ".join(map(str, rep.l_values)) + ")")
        out += [f"  xi_{i} xi_{j} = {pretty(x)} xi_{i + j}" for i, j, x in rep.e if i and j and i <= j]
    if rep.cup is not None:
        pts = {}
        for i, b, x in rep.point_classes:
            pts.setdefault((b, x), []).append(i)
        out.append("point classes:")
        out += [f"  e0[p{i}] = {pretty(x)} {b}" for i, b, x in rep.point_classes]
        out.append("orbifold cup products (D = sum of the sector's toric divisors):")
        for a, b, terms in rep.cup:
            rhs = " + ".join(f"{pretty(x)} {c}" if x != 1 else c for c, x in terms)
            note = ""
            if len(terms) == 1 and terms[0] in pts:
                note = "   = " + ", ".join(f"e0[p{i}]" for i in pts[terms[0]])
            out.append(f"  {a} * {b} = {rhs}{note}")
    if rep.result is not None:
        r = rep.result
        line = f"{r['kind']}: {pretty(r['value'])}"
        if r.get("note"):
            line += f"  ({r['note']})"
        out.append(line)
        for k, v in r.items():
            if k not in ("kind", "value", "note"):
                out.append(f"  {k}: {v}")
    return "\n".join(out) + "\n"


def run_threepoint(fan, triple: str, classes: str, seed: int) -> dict:
    names = split_top(triple, ",")
    if len(names) != 3:
        raise UsageError(f"--triple needs three sectors, got {len(names)}")
    secs = [resolve_sector(fan, x) for x in names]
    specs = split_top(classes, ";") if classes else ["1", "1", "1"]
    if len(specs) != 3:
        raise UsageError("--classes needs three ';'-separated class specs")
    etas = [parse_class(c, s) for c, s in zip(specs, secs)]
    res = {"kind": "three-point", "triple": [s.key for s in secs]}
    if len(set(secs[0].carrier) | set(secs[1].carrier)) > fan.n:
        res.update(value=Fraction(0), note="supports share no fixed point")
        return res
    t = make_triple(fan, secs[0].g, secs[1].g)
    if t.g3.key() != secs[2].g.key():
        res.update(value=Fraction(0), note="g1 g2 g3 != 1, no 3-multisector")
        return res
    ob = obstruction_bundle(fan, t)
    loc = three_point_detail(fan, t, etas, seed)
    res["value"] = loc.value
    res["note"] = {"degree": "degree mismatch", "vanishing": "iota sum exceeds n"}.get(loc.flag, "")
    res["iota_sum"] = pretty(t.iota_sum())
    res["obstruction_rank"] = ob.rank
    res["obstruction_summands"] = [list(x) for x in ob.summands]
    return res


def run_integrate(fan, sector: str, classes: str, seed: int) -> dict:
    s = resolve_sector(fan, sector or "1")
    cls = parse_class(classes or "1", s)
    loc = sector_integral(fan, s, cls, seed)
    return {"kind": "integral", "sector": s.key, "value": loc.value,
            "note": "degree mismatch" if loc.flag == "degree" else ""}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="crwps",
        description="Chen-Ruan orbifold cohomology of weighted projective spaces. "
                    "Commands: " + ", ".join(COMMANDS[:-1]) + " (default: full report).")
    p.add_argument("--weights", required=True, help="comma-separated weights, e.g. 2,3,4")
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--seed", type=int, default=0, help="seed for the localization lambda draws")
    p.add_argument("--triple", help="three sectors: labels g<i>, 1, or canonical keys")
    p.add_argument("--classes", help="';'-separated class specs, e.g. '[1,0,0];1;1' or 'D^2'")
    p.add_argument("--sector", help="sector for integrate (default: untwisted)")

    def fail(msg):
        raise UsageError(msg)
    p.error = fail
    return p


_SECTIONS = {
    "fan": {"fan"},
    "sectors": {"sectors"},
    "betti": {"betti"},
    "ring": {"ring"},
    "threepoint": set(),
    "integrate": set(),
    "report": {"fan", "sectors", "betti", "ring"},
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    cmd = "report"
    if argv and argv[0] in COMMANDS:
        cmd = argv.pop(0)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
        q = parse_weights(args.weights)
        rep = build_report(q, _SECTIONS[cmd], args.seed)
        fan = build_fan(q)
        if cmd == "threepoint":
            if not args.triple:
                raise UsageError("threepoint needs --triple")
            rep.result = run_threepoint(fan, args.triple, args.classes, args.seed)
        elif cmd == "integrate":
            rep.result = run_integrate(fan, args.sector, args.classes, args.seed)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(parser.format_usage(), end="", file=sys.stderr)
        return 1
    except UnknownKey as exc:
        print(f"error: unknown sector {exc.key!r}; valid sectors:", file=sys.stderr)
        for v in exc.valid:
            print(f"  {v}", file=sys.stderr)
        return 2
    sys.stdout.write(rep.to_json() + "\n" if args.json else render_text(rep))
    return 0


if __name__ == "__main__":
    sys.exit(main())
