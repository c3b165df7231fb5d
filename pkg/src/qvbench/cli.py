"""Command-line driver: workspace loading, command dispatch, and canonical
JSON reports.

Exit codes: 0 all verdicts hold, 1 some verdict fails, 2 some verdict is
unknown-within-bound (and none fails), 3 usage or parse error.  Reports are
canonical JSON (sorted keys, deterministic arrays, integers only), so identical
inputs produce byte-identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import __version__
from .core import (
    FiniteAlgebra,
    Homomorphism,
    is_embedding,
    is_homomorphism,
)
from .adjunction import (
    ExpansionSpec,
    FreeExtension,
    PpExpansionSpec,
    UndefinedAt,
    check_counit_iso,
    check_unit_mono,
    counit,
    expand_algebra,
    free_extension,
    induced_expansion,
)
from .beth import (
    MainTheoremReport,
    PreconditionError,
    RegularWitness,
    Verdict,
    check_beth_companion,
    check_faithful_term_equivalence,
    check_simple,
    check_simplicity_transfer,
    cross_validate_main_theorem,
    unit_counit_verdict,
)
from .implicit import (
    Extension,
    FunctionalityViolation,
    UniqueWitnessViolation,
    check_extendable,
    check_unique_witnesses,
)
from .parser import ParseError, Workspace, parse_workspace
from .quasivariety import (
    Amalgam,
    CapExceeded,
    NotFoundWithinBound,
    Quasivariety,
    bounded_amalgamation,
    enumerate_members,
    free_algebra,
    membership,
    relative_congruence,
)

DISCLAIMER = (
    "finite-scale semantics: every verdict quantifies only over the finite "
    "instances enumerated within the stated bounds; nothing is claimed beyond them"
)

COMMANDS = (
    "membership", "cg", "free", "expand", "reflect", "unit", "counit",
    "check-simple", "check-beth", "check-regular", "check-extendable",
    "check-unique-witnesses", "term-equiv", "cross-validate", "amalgamate",
    "enumerate",
)


@dataclass
class Report:
    check: str
    params: dict
    instances: list[dict]
    summary: str
    version: str = __version__
    disclaimer: str = DISCLAIMER

    def exit_code(self) -> int:
        verdicts = [inst.get("verdict") for inst in self.instances]
        if any(v == "fails" for v in verdicts):
            return 1
        if any(v == "unknown-within-bound" for v in verdicts):
            return 2
        return 0


def emit_report(report: Report, format: str = "json") -> bytes:
    if format == "json":
        payload = {
            "version": report.version,
            "check": report.check,
            "params": report.params,
            "instances": report.instances,
            "summary": report.summary,
            "disclaimer": report.disclaimer,
        }
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    lines = [f"{report.check} (qvbench {report.version})"]
    for k in sorted(report.params):
        lines.append(f"  {k} = {report.params[k]}")
    for inst in report.instances:
        lines.append(f"  [{inst.get('verdict', '-')}] {inst.get('name', '?')}")
        if "certificate" in inst:
            lines.append(f"      certificate: {json.dumps(inst['certificate'], sort_keys=True)}")
    lines.append(f"summary: {report.summary}")
    lines.append(f"note: {report.disclaimer}")
    return ("\n".join(lines) + "\n").encode()


def load_workspace(path: str) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse_workspace(fh.read())


# ---------------------------------------------------------------------------
# JSON encoders for certificates (full maps and tables, replayable)


def algebra_json(A: FiniteAlgebra) -> dict:
    return {
        "name": A.name,
        "signature": {"name": A.signature.name, "symbols": [[s, k] for s, k in A.signature.symbols]},
        "size": A.size,
        "tables": {sym: list(table) for (sym, _), table in zip(A.signature.symbols, A.tables)},
    }


def hom_json(h: Homomorphism) -> dict:
    return {
        "source": algebra_json(h.source),
        "target": algebra_json(h.target),
        "language": h.language.name,
        "map": list(h.mapping),
    }


def jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, FiniteAlgebra):
        return algebra_json(obj)
    if isinstance(obj, Homomorphism):
        return hom_json(obj)
    if isinstance(obj, Verdict):
        out = {"claim": obj.claim, "status": obj.status, "bounds": [list(b) for b in obj.bounds]}
        if obj.certificate is not None:
            out["certificate"] = jsonable(obj.certificate)
        if obj.notes:
            out["notes"] = list(obj.notes)
        return out
    if isinstance(obj, NotFoundWithinBound):
        return {"not-found-within-bound": obj.bound}
    if isinstance(obj, FunctionalityViolation):
        return {
            "functionality-violation": {
                "algebra": algebra_json(obj.algebra),
                "args": list(obj.args),
                "values": [obj.value_a, obj.value_b],
            }
        }
    if isinstance(obj, UniqueWitnessViolation):
        return {
            "unique-witness-violation": {
                "algebra": algebra_json(obj.algebra),
                "args": list(obj.args),
                "witnesses": [list(obj.witness_a), list(obj.witness_b)],
            }
        }
    if isinstance(obj, UndefinedAt):
        return {"undefined-at": {"op": obj.op_symbol, "args": list(obj.args)}}
    if isinstance(obj, Extension):
        return {"extension": {"algebra": algebra_json(obj.algebra), "embedding": list(obj.embedding.mapping)}}
    if isinstance(obj, (tuple, list)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if hasattr(obj, "__dataclass_fields__"):
        return {
            name: jsonable(getattr(obj, name)) for name in sorted(obj.__dataclass_fields__)
        }
    return repr(obj)


# ---------------------------------------------------------------------------
# flag value parsing


def parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for part in text.replace(" ", "").strip().strip(",").split("),"):
        part = part.strip("()")
        if not part:
            continue
        a, b = part.split(",")
        pairs.append((int(a), int(b)))
    return pairs


def parse_tuple(text: str) -> tuple[int, ...]:
    inner = text.replace(" ", "").strip().strip("()")
    if not inner:
        return ()
    return tuple(int(x) for x in inner.split(","))


def parse_map(text: str) -> dict[int, int]:
    out = {}
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        a, b = part.split(":")
        out[int(a)] = int(b)
    return out


def _hom_from_flags(ws: Workspace, source: str, target: str, mapping: str, language) -> Homomorphism:
    A = ws.lookup("algebras", source)
    B = ws.lookup("algebras", target)
    m = parse_map(mapping)
    full = tuple(m[i] for i in range(A.size))
    h = Homomorphism(A, B, language, full)
    if not is_homomorphism(h):
        raise ValueError(f"the map {mapping!r} is not a homomorphism {source} -> {target}")
    return h


def _expansion_pair(ws: Workspace, name: str) -> tuple[ExpansionSpec, PpExpansionSpec | None]:
    spec = ws.lookup("expansions", name)
    if isinstance(spec, ExpansionSpec):
        return spec, None
    return induced_expansion(spec), spec


# ---------------------------------------------------------------------------
# command implementations; each returns (instances, params)


def run(command: str, ws: Workspace, flags: dict) -> tuple[Report, int]:
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    handler = _HANDLERS[command.replace("-", "_")]
    instances, params = handler(ws, flags)
    held = sum(1 for i in instances if i.get("verdict") == "holds")
    summary = f"{held}/{len(instances)} hold"
    report = Report(check=command, params=params, instances=instances, summary=summary)
    return report, report.exit_code()


def _bounds(flags: dict) -> dict:
    return {
        "max-size": flags.get("max_size", 4),
        "ext-bound": flags.get("ext_bound", 6),
        "product-cap": flags.get("product_cap", 10**6),
        "jobs": flags.get("jobs", 1),
    }


def cmd_membership(ws, flags):
    A = ws.lookup("algebras", flags["algebra"])
    K = ws.lookup("quasivarieties", flags["in"])
    result = membership(A, K)
    inst = {"name": A.name, "bound": None, "verdict": "holds" if result.holds else "fails"}
    if result.holds and result.separating is not None:
        inst["certificate"] = {"separating-maps": [list(h.mapping) for h in result.separating]}
    if not result.holds:
        inst["certificate"] = jsonable(result)
    return [inst], {"algebra": A.name, "quasivariety": K.name, **_bounds(flags)}


def cmd_cg(ws, flags):
    A = ws.lookup("algebras", flags["algebra"])
    K = ws.lookup("quasivarieties", flags["in"])
    pairs = parse_pairs(flags["pairs"])
    theta = relative_congruence(A, pairs, K)
    from .core import quotient as _quotient

    Q, _ = _quotient(A, theta)
    inst = {
        "name": A.name,
        "bound": None,
        "verdict": "holds",
        "certificate": {
            "pairs": [list(p) for p in pairs],
            "partition": list(theta.partition),
            "blocks": [list(b) for b in theta.blocks()],
            "quotient-size": Q.size,
        },
    }
    return [inst], {"algebra": A.name, "quasivariety": K.name, "pairs": flags["pairs"], **_bounds(flags)}


def cmd_free(ws, flags):
    K = ws.lookup("quasivarieties", flags["in"])
    names = [n for n in flags["generators"].split(",") if n]
    T, gen_map = free_algebra(K, names, product_cap=flags.get("product_cap", 10**6))
    inst = {
        "name": f"T_{K.name}({len(names)})",
        "bound": None,
        "verdict": "holds",
        "certificate": {
            "size": T.size,
            "generator-map": {n: gen_map[n] for n in names},
            "algebra": algebra_json(T),
        },
    }
    return [inst], {"quasivariety": K.name, "generators": flags["generators"], **_bounds(flags)}


def cmd_expand(ws, flags):
    A = ws.lookup("algebras", flags["algebra"])
    spec = ws.lookup("expansions", flags["expansion"])
    if not isinstance(spec, PpExpansionSpec):
        raise ValueError("expand needs a pp expansion (QV + { ... })")
    result = expand_algebra(A, spec)
    if isinstance(result, FiniteAlgebra):
        inst = {"name": A.name, "bound": None, "verdict": "holds",
                "certificate": {"expanded": algebra_json(result)}}
    else:
        inst = {"name": A.name, "bound": None, "verdict": "fails", "certificate": jsonable(result)}
    return [inst], {"algebra": A.name, "expansion": flags["expansion"], **_bounds(flags)}


def cmd_reflect(ws, flags):
    A = ws.lookup("algebras", flags["algebra"])
    E, _ = _expansion_pair(ws, flags["expansion"])
    fe = free_extension(A, E, product_cap=flags.get("product_cap", 10**6))
    inst = {
        "name": A.name,
        "bound": None,
        "verdict": "holds",
        "certificate": {
            "reflected-size": fe.algebra.size,
            "unit-injective": fe.unit_injective,
            "unit-map": list(fe.unit.mapping),
            "factor-count": fe.factor_count,
            "reflected": algebra_json(fe.algebra),
        },
    }
    return [inst], {"algebra": A.name, "expansion": flags["expansion"], **_bounds(flags)}


def cmd_unit(ws, flags):
    E, _ = _expansion_pair(ws, flags["expansion"])
    bound = flags.get("max_size", 4)
    instances = []
    for item in check_unit_mono(E, bound, cap=bound):
        instances.append({
            "name": item.algebra.name,
            "bound": bound,
            "verdict": "holds" if item.embedding else "fails",
            "certificate": {"unit-map": list(item.unit.mapping)},
        })
    return instances, {"expansion": flags["expansion"], **_bounds(flags)}


def cmd_counit(ws, flags):
    E, _ = _expansion_pair(ws, flags["expansion"])
    bound = flags.get("max_size", 4)
    instances = []
    if flags.get("algebra"):
        B = ws.lookup("algebras", flags["algebra"])
        eps = counit(B, E)
        bij = eps.source.size == B.size and len(set(eps.mapping)) == B.size
        instances.append({
            "name": B.name, "bound": None,
            "verdict": "holds" if bij else "fails",
            "certificate": {"counit-map": list(eps.mapping), "reflected-size": eps.source.size},
        })
    else:
        for item in check_counit_iso(E, bound, cap=bound):
            instances.append({
                "name": item.algebra.name,
                "bound": bound,
                "verdict": "holds" if item.bijective else "fails",
                "certificate": {"counit-map": list(item.counit.mapping),
                                "reflected-size": item.counit.source.size},
            })
    return instances, {"expansion": flags["expansion"], **_bounds(flags)}


def _verdict_instance(name: str, v: Verdict, bound) -> dict:
    inst = {"name": name, "bound": bound, "verdict": v.status}
    if v.certificate is not None:
        inst["certificate"] = jsonable(v.certificate)
    if v.notes:
        inst["notes"] = list(v.notes)
    return inst


def cmd_check_simple(ws, flags):
    spec = ws.lookup("expansions", flags["expansion"])
    if not isinstance(spec, PpExpansionSpec):
        raise ValueError("check-simple needs a pp expansion")
    bound = flags.get("max_size", 4)
    v = check_simple(spec, bound, cap=bound)
    return [_verdict_instance(flags["expansion"], v, bound)], {
        "expansion": flags["expansion"], **_bounds(flags)
    }


def cmd_check_beth(ws, flags):
    spec = ws.lookup("expansions", flags["expansion"])
    if not isinstance(spec, PpExpansionSpec):
        raise ValueError("check-beth needs a pp expansion")
    ops = tuple(
        ws.lookup("ppops", name) for name in flags.get("ops", "").split(",") if name
    )
    bound = flags.get("max_size", 4)
    v = check_beth_companion(spec, ops, bound, cap=bound)
    return [_verdict_instance(flags["expansion"], v, bound)], {
        "expansion": flags["expansion"],
        "ops": flags.get("ops", ""),
        **_bounds(flags),
    }


def cmd_check_regular(ws, flags):
    M = ws.lookup("quasivarieties", flags["in"])
    h = _hom_from_flags(ws, flags["source"], flags["target"], flags["map"], M.signature)
    if not is_embedding(h):
        raise ValueError("the supplied map is not an embedding")
    bound = flags.get("ext_bound", 6)
    result = check_regular_mono_cli(h, M, bound)
    return [result], {
        "quasivariety": M.name, "source": flags["source"], "target": flags["target"],
        "map": flags["map"], **_bounds(flags),
    }


def check_regular_mono_cli(h, M, bound) -> dict:
    from .beth import check_regular_mono

    result = check_regular_mono(h, M, size_bound=bound, cap=bound)
    if isinstance(result, RegularWitness):
        g1, g2 = result.equalizer_of
        return {
            "name": f"{h.source.name}->{h.target.name}",
            "bound": bound,
            "verdict": "holds",
            "certificate": {
                "codomain": algebra_json(result.codomain),
                "parallel-pair": [list(g1.mapping), list(g2.mapping)],
            },
        }
    return {
        "name": f"{h.source.name}->{h.target.name}",
        "bound": bound,
        "verdict": "unknown-within-bound",
        "certificate": jsonable(result),
    }


def cmd_check_extendable(ws, flags):
    s = ws.lookup("ppops", flags["ppop"])
    K = ws.lookup("quasivarieties", flags["in"])
    A = ws.lookup("algebras", flags["algebra"])
    args = parse_tuple(flags["tuple"])
    bound = flags.get("ext_bound", 6)
    result = check_extendable(s, K, A, args, bound, cap=bound)
    if isinstance(result, Extension):
        inst = {"name": A.name, "bound": bound, "verdict": "holds", "certificate": jsonable(result)}
    else:
        inst = {"name": A.name, "bound": bound, "verdict": "unknown-within-bound",
                "certificate": jsonable(result)}
    return [inst], {"ppop": s.name, "quasivariety": K.name, "algebra": A.name,
                    "tuple": flags["tuple"], **_bounds(flags)}


def cmd_check_unique_witnesses(ws, flags):
    s = ws.lookup("ppops", flags["ppop"])
    K = ws.lookup("quasivarieties", flags["in"])
    bound = flags.get("max_size", 4)
    result = check_unique_witnesses(s, K, bound, cap=bound)
    if result == "ok":
        inst = {"name": s.name, "bound": bound, "verdict": "holds"}
    else:
        inst = {"name": s.name, "bound": bound, "verdict": "fails", "certificate": jsonable(result)}
    return [inst], {"ppop": s.name, "quasivariety": K.name, **_bounds(flags)}


def cmd_term_equiv(ws, flags):
    M1 = ws.lookup("quasivarieties", flags["m1"])
    M2 = ws.lookup("quasivarieties", flags["m2"])
    tau = ws.lookup("translations", flags["tau"])
    rho = ws.lookup("translations", flags["rho"])
    K = ws.lookup("quasivarieties", flags["in"])
    bound = flags.get("max_size", 4)
    v = check_faithful_term_equivalence(M1, M2, tau, rho, K, bound, cap=bound)
    instances = [_verdict_instance(f"{M1.name}~{M2.name}", v, bound)]
    if flags.get("transfer") and v.holds:
        t = check_simplicity_transfer(M1, M2, tau, rho, K, bound, cap=bound)
        instances.append(_verdict_instance("simplicity-transfer", t, bound))
    return instances, {
        "m1": M1.name, "m2": M2.name, "tau": flags["tau"], "rho": flags["rho"],
        "quasivariety": K.name, **_bounds(flags),
    }


def cmd_cross_validate(ws, flags):
    E, P = _expansion_pair(ws, flags["expansion"])
    if flags.get("pp_expansion"):
        P = ws.lookup("expansions", flags["pp_expansion"])
        if not isinstance(P, PpExpansionSpec):
            raise ValueError("--pp-expansion must name a pp expansion")
    bound = flags.get("max_size", 4)
    report = cross_validate_main_theorem(E, P, bound, cap=bound)
    instances = []
    if report.simple is not None:
        instances.append(_verdict_instance("simple-pp-expansion", report.simple, bound))
    instances.append(_verdict_instance("unit-mono-counit-iso", report.unit_counit, bound))
    instances.append(_verdict_instance("mono-reflective", report.mono_reflective, bound))
    instances.append({
        "name": "consistency",
        "bound": bound,
        "verdict": "holds" if report.consistent else "fails",
        "notes": list(report.notes),
    })
    return instances, {"expansion": flags["expansion"], **_bounds(flags)}


def cmd_amalgamate(ws, flags):
    K = ws.lookup("quasivarieties", flags["in"])
    A = ws.lookup("algebras", flags["apex"])
    B = ws.lookup("algebras", flags["left"])
    C = ws.lookup("algebras", flags["right"])
    f = _hom_from_flags(ws, flags["apex"], flags["left"], flags["left_map"], K.signature)
    g = _hom_from_flags(ws, flags["apex"], flags["right"], flags["right_map"], K.signature)
    bound = flags.get("ext_bound", 6)
    result = bounded_amalgamation(A, B, C, f, g, K, bound, cap=bound)
    if isinstance(result, Amalgam):
        inst = {
            "name": f"{B.name}<-{A.name}->{C.name}",
            "bound": bound,
            "verdict": "holds",
            "certificate": {
                "amalgam": algebra_json(result.apex),
                "left-leg": list(result.left_leg.mapping),
                "right-leg": list(result.right_leg.mapping),
            },
        }
    else:
        inst = {"name": f"{B.name}<-{A.name}->{C.name}", "bound": bound,
                "verdict": "unknown-within-bound", "certificate": jsonable(result)}
    return [inst], {"quasivariety": K.name, **_bounds(flags)}


def cmd_enumerate(ws, flags):
    K = ws.lookup("quasivarieties", flags["in"])
    n = flags.get("size", flags.get("max_size", 4))
    cap = max(n, flags.get("max_size", 4))
    members = enumerate_members(K, n, cap=cap)
    instances = [
        {"name": A.name, "bound": n, "verdict": "holds", "certificate": {"algebra": algebra_json(A)}}
        for A in members
    ]
    return instances, {"quasivariety": K.name, "size": n, **_bounds(flags)}


_HANDLERS = {
    "membership": cmd_membership,
    "cg": cmd_cg,
    "free": cmd_free,
    "expand": cmd_expand,
    "reflect": cmd_reflect,
    "unit": cmd_unit,
    "counit": cmd_counit,
    "check_simple": cmd_check_simple,
    "check_beth": cmd_check_beth,
    "check_regular": cmd_check_regular,
    "check_extendable": cmd_check_extendable,
    "check_unique_witnesses": cmd_check_unique_witnesses,
    "term_equiv": cmd_term_equiv,
    "cross_validate": cmd_cross_validate,
    "amalgamate": cmd_amalgamate,
    "enumerate": cmd_enumerate,
}


def build_argparser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="qvbench", description=__doc__)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--workspace", required=True, help="workspace file to load")
        p.add_argument("--max-size", type=int, default=4, dest="max_size")
        p.add_argument("--ext-bound", type=int, default=6, dest="ext_bound")
        p.add_argument("--product-cap", type=int, default=10**6, dest="product_cap")
        p.add_argument("--report", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--jobs", type=int, default=1)

    specs = {
        "membership": ["--algebra", "--in"],
        "cg": ["--algebra", "--in", "--pairs"],
        "free": ["--in", "--generators"],
        "expand": ["--algebra", "--expansion"],
        "reflect": ["--algebra", "--expansion"],
        "unit": ["--expansion"],
        "counit": ["--expansion", "--algebra?"],
        "check-simple": ["--expansion"],
        "check-beth": ["--expansion", "--ops"],
        "check-regular": ["--in", "--source", "--target", "--map"],
        "check-extendable": ["--ppop", "--in", "--algebra", "--tuple"],
        "check-unique-witnesses": ["--ppop", "--in"],
        "term-equiv": ["--m1", "--m2", "--tau", "--rho", "--in", "--transfer?flag"],
        "cross-validate": ["--expansion", "--pp-expansion?"],
        "amalgamate": ["--in", "--apex", "--left", "--right", "--left-map", "--right-map"],
        "enumerate": ["--in", "--size?int"],
    }
    for name, flag_specs in specs.items():
        p = sub.add_parser(name)
        common(p)
        for f in flag_specs:
            optional = f.endswith("?") or "?" in f
            base = f.split("?")[0]
            dest = base.lstrip("-").replace("-", "_")
            if f.endswith("?flag"):
                p.add_argument(base, action="store_true", dest=dest)
            elif f.endswith("?int"):
                p.add_argument(base, type=int, default=None, dest=dest)
            elif optional:
                p.add_argument(base, default=None, dest=dest)
            else:
                p.add_argument(base, required=True, dest=dest)
    return top


def main(argv=None) -> int:
    parser = build_argparser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    flags = {k: v for k, v in vars(ns).items() if v is not None}
    try:
        ws = load_workspace(ns.workspace)
        report, code = run(ns.command, ws, flags)
    except (ParseError, PreconditionError, CapExceeded, KeyError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    payload = emit_report(report, ns.format)
    if ns.report:
        with open(ns.report, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
