"""Shared fixture objects: bounded lattices, Boolean algebras, semilattices,
a monoid, and the pp operations and expansion specs built from them.  The same
objects are shipped in textual form in workspaces/fixtures.qvw.
"""
from __future__ import annotations

from .core import Signature, build_algebra, reduct
from .logic import App, Equation, PpFormula, Quasiequation, Var
from .adjunction import ExpansionSpec, PpExpansionSpec
from .beth import TermTranslation
from .implicit import ImplicitOpSpec
from .quasivariety import Quasivariety

BDL = Signature("BDL", (("meet", 2), ("join", 2), ("bot", 0), ("top", 0)))
BA = Signature("BA", BDL.symbols + (("not", 1),))
MSL = Signature("MSL", (("meet", 2), ("bot", 0), ("top", 0)))
MON = Signature("MON", (("mul", 2), ("e", 0)))
BIMP = Signature("BIMP", BDL.symbols + (("imp", 2),))


def _chain(n: int, name: str):
    return build_algebra(
        name, BDL, n, {"meet": min, "join": max, "bot": 0, "top": n - 1}
    )


CHAIN2 = _chain(2, "Chain2")
CHAIN3 = _chain(3, "Chain3")
CHAIN4 = _chain(4, "Chain4")

# The four-element lattice with two incomparable atoms, on bitmasks: 0 < 1,2 < 3.
DIAMOND = build_algebra(
    "Diamond", BDL, 4, {"meet": lambda a, b: a & b, "join": lambda a, b: a | b, "bot": 0, "top": 3}
)

TWO_BA = build_algebra(
    "TwoBA", BA, 2,
    {"meet": min, "join": max, "bot": 0, "top": 1, "not": lambda a: 1 - a},
)
FOUR_BA = build_algebra(
    "FourBA", BA, 4,
    {"meet": lambda a, b: a & b, "join": lambda a, b: a | b, "bot": 0, "top": 3,
     "not": lambda a: 3 ^ a},
)

CHAIN2_MS = reduct(CHAIN2, MSL).renamed("Chain2MS")
DIAMOND_MS = reduct(DIAMOND, MSL).renamed("DiamondMS")

# Two-element meet-semilattice monoid: multiplication is min, unit is 1.
MIN_MON = build_algebra("MinMon", MON, 2, {"mul": min, "e": 1})

TWO_IMP = build_algebra(
    "TwoImp", BIMP, 2,
    {"meet": min, "join": max, "bot": 0, "top": 1,
     "imp": lambda a, b: max(1 - a, b)},
)

DL = Quasivariety("DL", BDL, generators=(CHAIN2,))
BOOL = Quasivariety("BOOL", BA, generators=(TWO_BA,))
MSLQ = Quasivariety("MSLQ", MSL, generators=(CHAIN2_MS,))
MONQ = Quasivariety("MONQ", MON, generators=(MIN_MON,))
BIMPQ = Quasivariety("BIMPQ", BIMP, generators=(TWO_IMP,))


def _v(n):
    return Var(n)


def _meet(a, b):
    return App("meet", (a, b))


def _join(a, b):
    return App("join", (a, b))


_x, _y, _z = _v("x"), _v("y"), _v("z")
_bot, _top = App("bot"), App("top")

# Equational base for bounded distributive lattices, as premise-free
# quasiequations; sound and complete for the finite members of DL.
DL_AXIOMS: tuple[Quasiequation, ...] = tuple(
    Quasiequation((), Equation(lhs, rhs))
    for lhs, rhs in [
        (_meet(_x, _x), _x),
        (_join(_x, _x), _x),
        (_meet(_x, _y), _meet(_y, _x)),
        (_join(_x, _y), _join(_y, _x)),
        (_meet(_meet(_x, _y), _z), _meet(_x, _meet(_y, _z))),
        (_join(_join(_x, _y), _z), _join(_x, _join(_y, _z))),
        (_meet(_x, _join(_x, _y)), _x),
        (_join(_x, _meet(_x, _y)), _x),
        (_meet(_x, _join(_y, _z)), _join(_meet(_x, _y), _meet(_x, _z))),
        (_join(_x, _bot), _x),
        (_meet(_x, _top), _x),
        (_meet(_x, _bot), _bot),
        (_join(_x, _top), _top),
    ]
)

DLAX = Quasivariety("DLAX", BDL, axioms=DL_AXIOMS)

_x1 = Var("x1")
_yv = Var("y")
_z1 = Var("z1")

# compl(x; y): y is a complement of x.  No witness variables.
COMPL = ImplicitOpSpec(
    "compl", BDL, 1, 0,
    PpFormula(
        (),
        (Equation(_meet(_x1, _yv), _bot), Equation(_join(_x1, _yv), _top)),
    ),
)

# inv(x; y): y is a two-sided inverse of x.
INV = ImplicitOpSpec(
    "inv", MON, 1, 0,
    PpFormula(
        (),
        (
            Equation(App("mul", (_x1, _yv)), App("e")),
            Equation(App("mul", (_yv, _x1)), App("e")),
        ),
    ),
)

# compl with a padded, unconstrained witness: never has unique witnesses on
# members with more than one element.
COMPL_PADDED = ImplicitOpSpec(
    "complpad", BDL, 1, 1,
    PpFormula(
        ("z1",),
        (
            Equation(_z1, _z1),
            Equation(_meet(_x1, _yv), _bot),
            Equation(_join(_x1, _yv), _top),
        ),
    ),
)

# join_with_complement(x; y): y = x v z for some complement z of x.  Total
# exactly on the complemented members, yet constantly top there, so proper
# subalgebras of expanded members need not be expandable.
JOIN_WITH_COMPL = ImplicitOpSpec(
    "joincompl", BDL, 1, 1,
    PpFormula(
        ("z1",),
        (
            Equation(_meet(_x1, _z1), _bot),
            Equation(_join(_x1, _z1), _top),
            Equation(_yv, _join(_x1, _z1)),
        ),
    ),
)

DL_TO_BOOL = ExpansionSpec(DL, BOOL)
MSL_TO_DL = ExpansionSpec(MSLQ, DL)
DL_TO_BIMP = ExpansionSpec(DL, BIMPQ)
DL_TRIVIAL = ExpansionSpec(DL, DL)

PP_COMPL = PpExpansionSpec(DL, (("not", COMPL),))
PP_EMPTY = PpExpansionSpec(DL, ())
PP_JC = PpExpansionSpec(DL, (("jc", JOIN_WITH_COMPL),))

NOT_TO_IMP = TermTranslation(
    BA, BIMP, (("not", App("imp", (Var("x1"), App("bot")))),)
)
IMP_TO_NOT = TermTranslation(
    BIMP, BA, (("imp", App("join", (App("not", (Var("x1"),)), Var("x2")))),)
)
