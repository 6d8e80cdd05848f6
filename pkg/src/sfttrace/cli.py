"""Command-line interface: config ingestion and experiment drivers.

Subcommands:
  inspect    eigen-data, entropy, mixing status, 1-cylinder masses
  measures   cylinder masses and traces for the configured elements
  enumerate  heteroclinic points up to a window
  trace-run  scaled-trace CSV plus a convergence summary
  theorem13  finite-rank product, vanishing-product and commutator checks
  verify     the acceptance battery (exit 3 on any failure)

Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
4 resource cap exceeded.

The config document is JSON:

  {
    "sft": {"symbols": ["0", "1"], "matrix": [[1, 1], [1, 0]]},
    "P": [["0"]],            # forward orbit set: list of cyclic words
    "Q": [["0"]],            # backward orbit set
    "a": {"side": "stable", "terms": [
        {"coeff": [1.0, 0.0],
         "target_ray": {"orbit": ["0"], "phase": 0, "body": []},
         "source_ray": {"orbit": ["0"], "phase": 0, "body": []},
         "window": 0}]},
    "b": {"side": "unstable", "terms": [...]},
    "k_range": [0, 15],
    "tolerances": {"final_abs_err": 1e-7},
    "output": "trace.csv"
  }

A stable term's rays fix coordinates below the window (the body occupies
[window - len(body), window)); an unstable term's rays fix coordinates
from the window on (body on [window, window + len(body))).  Stable rays
must run over orbits of Q, unstable rays over orbits of P.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from dataclasses import dataclass

from . import acceptance
from .algebra import (
    AlgebraElement,
    BisectionError,
    SideMismatch,
    StableBisection,
    UnstableBisection,
    element,
    tau_s,
    tau_u,
)
from .perron import NotPrimitive, PerronData, compute_perron, entropy, mu_bowen
from .points import (
    InadmissibleOrbit,
    InadmissibleRay,
    PeriodicOrbitSet,
    enumerate_heteroclinic,
    make_left_ray,
    make_orbit,
    make_orbit_set,
    make_right_ray,
)
from .rep import (
    OrbitsNotDisjoint,
    WindowOverflow,
    commutator_decay,
    product_operator,
    scaled_trace_sequence,
    vanishing_product_check,
)
from .sft import InvalidMatrix, Sft, Word, ZeroRowOrColumn, make_sft

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(msg if line is None else f"line {line}: {msg}")


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    sft: Sft
    p_set: PeriodicOrbitSet
    q_set: PeriodicOrbitSet
    a: AlgebraElement
    b: AlgebraElement
    k_range: tuple[int, int]
    tolerances: dict
    output: str | None

    def doc(self) -> dict:
        """The normalized JSON document (canonical ray forms)."""
        lab = self.sft.label
        return {
            "sft": {
                "symbols": [lab(i) for i in range(self.sft.n)],
                "matrix": [list(row) for row in self.sft.trans],
            },
            "P": [[lab(s) for s in o.word] for o in self.p_set.orbits],
            "Q": [[lab(s) for s in o.word] for o in self.q_set.orbits],
            "a": _element_doc(self.a, lab),
            "b": _element_doc(self.b, lab),
            "k_range": list(self.k_range),
            "tolerances": dict(sorted(self.tolerances.items())),
            "output": self.output,
        }


def _ray_doc(ray, lab) -> dict:
    return {"orbit": [lab(q) for q in ray.orbit.word],
            "phase": ray.phase,
            "body": [lab(q) for q in ray.body]}


def _element_doc(x: AlgebraElement, lab) -> dict:
    terms = [
        {"coeff": [c.real, c.imag],
         "target_ray": _ray_doc(bis.target, lab),
         "source_ray": _ray_doc(bis.source, lab),
         "window": bis.window}
        for c, bis in x.terms
    ]
    return {"side": x.side, "terms": terms}


def _parse_orbit_set(sft, words, field) -> PeriodicOrbitSet:
    try:
        return make_orbit_set(
            [[sft.symbol_of(lab) for lab in w] for w in words], sft
        )
    except (InadmissibleOrbit, ValueError) as exc:
        raise ValidationError(f"{field}: {exc}") from exc


def _parse_element(sft, doc, p_set, q_set, field) -> AlgebraElement:
    side = doc.get("side")
    if side not in ("stable", "unstable"):
        raise ValidationError(f"{field}: side must be 'stable' or 'unstable'")
    orbit_set = q_set if side == "stable" else p_set
    terms = []
    for i, term in enumerate(doc.get("terms", [])):
        try:
            coeff = complex(term["coeff"][0], term["coeff"][1])
            window = int(term["window"])
            rays = []
            for key in ("target_ray", "source_ray"):
                rdoc = term[key]
                orbit = make_orbit([sft.symbol_of(lab) for lab in rdoc["orbit"]], sft)
                if orbit not in orbit_set:
                    raise ValidationError(
                        f"{field}.terms[{i}].{key}: orbit {rdoc['orbit']} not in the "
                        f"{'Q' if side == 'stable' else 'P'} orbit set"
                    )
                body = tuple(sft.symbol_of(lab) for lab in rdoc["body"])
                phase = int(rdoc.get("phase", 0))
                if side == "stable":
                    rays.append(make_left_ray(sft, orbit, phase,
                                              window - len(body), body, window))
                else:
                    rays.append(make_right_ray(sft, orbit, phase,
                                               window, body, window + len(body)))
            bis_cls = StableBisection if side == "stable" else UnstableBisection
            terms.append((coeff, bis_cls(rays[0], rays[1])))
        except ValidationError:
            raise
        except (KeyError, IndexError, TypeError) as exc:
            raise ValidationError(f"{field}.terms[{i}]: malformed term ({exc})") from exc
        except (InadmissibleOrbit, InadmissibleRay, BisectionError, SideMismatch) as exc:
            raise ValidationError(f"{field}.terms[{i}]: {exc}") from exc
    return element(side, terms)


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a parsed JSON document; all admissibility checks run eagerly."""
    if not isinstance(doc, dict) or not doc:
        raise ValidationError("empty config document")
    try:
        sft = make_sft(doc["sft"]["matrix"], doc["sft"].get("symbols"))
    except KeyError as exc:
        raise ValidationError(f"missing field {exc}") from exc
    except (InvalidMatrix, ZeroRowOrColumn) as exc:
        raise ValidationError(f"sft: {exc}") from exc
    p_set = _parse_orbit_set(sft, doc.get("P", []), "P")
    q_set = _parse_orbit_set(sft, doc.get("Q", []), "Q")
    if not p_set.orbits or not q_set.orbits:
        raise ValidationError("P and Q must each contain at least one orbit")
    a = _parse_element(sft, doc.get("a", {"side": "stable", "terms": []}),
                       p_set, q_set, "a")
    b = _parse_element(sft, doc.get("b", {"side": "unstable", "terms": []}),
                       p_set, q_set, "b")
    k_range = doc.get("k_range", [0, 10])
    if (not isinstance(k_range, (list, tuple)) or len(k_range) != 2
            or k_range[1] < k_range[0]):
        raise ValidationError("k_range must be [first, last] with first <= last")
    return ExperimentConfig(sft, p_set, q_set, a, b,
                            (int(k_range[0]), int(k_range[1])),
                            dict(doc.get("tolerances", {})),
                            doc.get("output"))


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return parse_config(doc)


def write_config(config: ExperimentConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.doc(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_inspect(config: ExperimentConfig) -> int:
    sft = config.sft
    try:
        p = compute_perron(sft)
    except NotPrimitive:
        print("not mixing: the transition matrix is not primitive; no Perron data")
        return EXIT_VALIDATION
    print(f"symbols   : {[sft.label(i) for i in range(sft.n)]}")
    print(f"mixing    : True")
    print(f"lambda    : {p.lam!r}")
    print(f"entropy   : {entropy(p)!r}")
    print(f"v (right) : {[round(x, 12) for x in p.v]}")
    print(f"u (left)  : {[round(x, 12) for x in p.u]}")
    print(f"residual  : {p.residual:.3e}")
    for i in range(sft.n):
        print(f"mu[{sft.label(i)}]     : {mu_bowen(p, Word(0, (i,)))!r}")
    return EXIT_OK


def cmd_measures(config: ExperimentConfig) -> int:
    p = compute_perron(config.sft)
    sft = config.sft
    print("1-cylinder masses:")
    for i in range(sft.n):
        print(f"  [{sft.label(i)}] {mu_bowen(p, Word(0, (i,)))!r}")
    print("2-cylinder masses:")
    for i in range(sft.n):
        for j in range(sft.n):
            if sft.allowed(i, j):
                print(f"  [{sft.label(i)}{sft.label(j)}] {mu_bowen(p, Word(0, (i, j)))!r}")
    ts = tau_s(config.a, p)
    tu = tau_u(config.b, p)
    print(f"tau_s(a) = {_fmt_complex(ts)}")
    print(f"tau_u(b) = {_fmt_complex(tu)}")
    print(f"tau_s(a) * tau_u(b) = {_fmt_complex(ts * tu)}")
    return EXIT_OK


def cmd_enumerate(config: ExperimentConfig, window: int) -> int:
    pts = enumerate_heteroclinic(config.sft, config.p_set, config.q_set, window)
    print(f"{len(pts)} heteroclinic points with canonical window inside "
          f"[-{window}, {window}]")
    for z in pts[:200]:
        print(f"  {z.render(config.sft)}")
    if len(pts) > 200:
        print(f"  ... ({len(pts) - 200} more)")
    return EXIT_OK


def cmd_trace_run(config: ExperimentConfig, out: str | None, kmax: int | None,
                  timestamp: bool) -> int:
    p = compute_perron(config.sft)
    k_lo, k_hi = config.k_range
    if kmax is not None:
        k_hi = kmax
    if config.a.is_zero or config.b.is_zero:
        raise ValidationError("trace runs need nonzero elements a and b")
    report = scaled_trace_sequence(config.a, config.b, range(k_lo, k_hi + 1), p)
    lines = report.csv_lines()
    path = out or config.output
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            if timestamp:
                now = datetime.datetime.now(datetime.timezone.utc)
                fh.write(f"# generated {now.isoformat()}\n")
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {path} ({len(report.rows)} rows)")
    else:
        print("\n".join(lines))
    print(f"target tau_s(a)*tau_u(b) = {_fmt_complex(report.target)}")
    print(f"final abs error          = {report.final_error()!r}")
    rate = report.fitted_decay_rate()
    if not math.isnan(rate):
        print(f"fitted error decay rate  = {rate:.6g} per step")
    zeros = [row.trace.exact_total() == (0, 0) for row in report.rows]
    if zeros and zeros[-1]:
        first_zero = len(zeros) - 1
        while first_zero > 0 and zeros[first_zero - 1]:
            first_zero -= 1
        if all(zeros[first_zero:]):
            k0 = report.rows[first_zero].k
            print(f"exact-zero regime: every trace vanishes for k >= {k0} "
                  f"(roundtrip fixed-point sets empty)")
    tol = config.tolerances.get("final_abs_err")
    if tol is not None and report.rows and report.final_error() > tol:
        print(f"FAIL final error {report.final_error():.3e} > {tol:g}")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_theorem13(config: ExperimentConfig, nmax: int) -> int:
    p = compute_perron(config.sft)
    a, b = config.a, config.b
    t_ab = product_operator(a, b, p, "ab")
    t_ba = product_operator(a, b, p, "ba")
    print(f"rank(a.b) = {t_ab.rank()}, rank(b.a) = {t_ba.rank()} (finite rank)")
    if config.p_set.isdisjoint(config.q_set):
        print("shifted products (disjoint orbit sets):")
        for n, nab, nba in vanishing_product_check(a, b, p, config.p_set,
                                                   config.q_set, nmax):
            print(f"  n={n:<3} |a_n.b| = {nab!r}  |b.a_n| = {nba!r}")
    else:
        print("orbit sets are not disjoint; skipping the vanishing-product check")
    print("commutator decay:")
    for n, norm in commutator_decay(a, b, p, range(0, nmax + 1)):
        print(f"  n={n:<3} |[a_n, b_n]| = {norm!r}")
    return EXIT_OK


def cmd_verify(config: ExperimentConfig | None) -> int:
    summary = acceptance.run_all()
    for row in summary.rows:
        print(row.line())
    if config is not None:
        print(f"config OK: {config.sft.n} symbols, "
              f"{len(config.p_set.orbits)}+{len(config.q_set.orbits)} orbits, "
              f"a has {len(config.a.terms)} terms, b has {len(config.b.terms)} terms")
    if not summary.all_passed:
        print("FAILURES")
        return EXIT_NUMERICAL
    print("all criteria passed")
    return EXIT_OK


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{z.imag:+}j"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfttrace",
        description="groupoid algebras and trace asymptotics for shifts of finite type",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_config=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=needs_config,
                        help="path to the JSON experiment config")
        return sp

    add("inspect", "print eigen-data, entropy, and 1-cylinder masses")
    add("measures", "print cylinder masses and element traces")
    sp = add("enumerate", "list heteroclinic points up to a window")
    sp.add_argument("--window", type=int, default=3)
    sp = add("trace-run", "write the scaled-trace CSV and a summary")
    sp.add_argument("--out", default=None, help="CSV output path (overrides config)")
    sp.add_argument("--kmax", type=int, default=None, help="override the last k")
    sp.add_argument("--no-timestamp", action="store_true",
                    help="omit the timestamp comment for byte-identical output")
    sp = add("theorem13", "finite-rank, vanishing-product and commutator checks")
    sp.add_argument("--nmax", type=int, default=10)
    sp = add("verify", "run the acceptance battery", needs_config=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if getattr(args, "config", None) else None
        if args.command == "inspect":
            return cmd_inspect(config)
        if args.command == "measures":
            return cmd_measures(config)
        if args.command == "enumerate":
            return cmd_enumerate(config, args.window)
        if args.command == "trace-run":
            return cmd_trace_run(config, args.out, args.kmax, not args.no_timestamp)
        if args.command == "theorem13":
            return cmd_theorem13(config, args.nmax)
        if args.command == "verify":
            return cmd_verify(config)
        raise AssertionError(f"unhandled command {args.command}")
    except (ParseError, ValidationError, NotPrimitive, OrbitsNotDisjoint,
            InadmissibleOrbit, InadmissibleRay, ZeroRowOrColumn, InvalidMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except WindowOverflow as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
