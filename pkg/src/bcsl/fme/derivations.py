"""Re-derivation of the bound inequality lists from the raw coding systems.

Each driver loads the raw constraint fixtures, pins the two security
partition rates to their information-constant values, folds the secret-rate
decomposition into the retained rate symbols, projects out the bookkeeping
variables by exact Fourier-Motzkin elimination, and certifies two-way
equivalence against the target fixture.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .farkas import EquivalenceReport, check_equivalence, remove_redundant
from .system import IneqSystem

ONE = Fraction(1)

# value of the U2-layer security partition rate (slack taken to zero)
U2_LEAK = "I(U2;Y3|U1)"
# value of the X-layer security partition rate (slack taken to zero)
X_LEAK = "I(X;Y3|U2)"

INNER_ELIM_ORDER = ("R1dag", "P3dag", "Q2", "Q3", "P3")
TYPE1_ELIM_ORDER = ("Q2", "Q3", "P1e", "P2e")

# inserted-layer constants -> base constants (None: conditioning collapses
# the constant to zero once the layer is pinned to the cloud center)
APPENDIX_MERGE: dict[str, str | None] = {
    "I(X;Y1|tU2)": "I(X;Y1|U1)",
    "I(X;Y1|U3,tU2)": "I(X;Y1|U3)",
    "I(U2;Y2|tU2)": "I(U2;Y2|U1)",
    "I(tU2;U3|U1)": None,
}


def load_fixture(name: str) -> IneqSystem:
    text = resources.files(__package__).joinpath("fixtures", name).read_text()
    return IneqSystem.parse(text)


def load_identities() -> IneqSystem:
    return load_fixture("identities.txt")


def _drop(system: IneqSystem, tags: Iterable[str]) -> IneqSystem:
    tags = set(tags)
    unknown = tags - {r.tag for r in system.rows}
    if unknown:
        raise KeyError(f"no rows tagged {sorted(unknown)}")
    return IneqSystem(tuple(r for r in system.rows if r.tag not in tags))


def inner_raw_system() -> IneqSystem:
    rows = (load_fixture("inner_bin_pairing.txt").rows
            + load_fixture("inner_decoding.txt").rows
            + load_fixture("inner_partition_floor.txt").rows)
    return IneqSystem(rows)


def derive_inner_bound(order: Sequence[str] = INNER_ELIM_ORDER,
                       drop_tags: Iterable[str] = (),
                       ) -> tuple[IneqSystem, EquivalenceReport]:
    """Project the raw three-message system and compare with its target list.

    Returns (derived system over {R0, R1e, R2e}, equivalence report).
    """
    raw = _drop(inner_raw_system(), drop_tags)
    # pin the security partition rates, then express the second private
    # message through its split R2e = P1e + P3
    raw = (raw.substitute("R1p", {U2_LEAK: ONE})
              .substitute("P1p", {X_LEAK: ONE})
              .substitute("P1e", {"R2e": ONE, "P3": -ONE}))
    # the retained rates live in the nonnegative orthant by definition
    rates = ("R0", "R1e", "R2e")
    derived = raw
    for var in order:
        derived = remove_redundant(derived.eliminate(var), nonneg_vars=rates)
    derived = derived.sorted()

    target = (load_fixture("inner_bound_target.txt")
              .substitute("R1", {"R1e": ONE, U2_LEAK: ONE})
              .substitute("R2", {"R2e": ONE, X_LEAK: ONE}))
    report = check_equivalence(derived, target, load_identities(),
                               a_name="derived", b_name="target",
                               nonneg_vars=rates)
    return derived, report


def type1_raw_system() -> IneqSystem:
    rows = (load_fixture("type1_bin_pairing.txt").rows
            + load_fixture("type1_decoding.txt").rows
            + load_fixture("type1_partition_floor.txt").rows)
    return IneqSystem(rows)


def derive_type1_bound(order: Sequence[str] = TYPE1_ELIM_ORDER,
                       drop_tags: Iterable[str] = (),
                       ) -> tuple[IneqSystem, EquivalenceReport]:
    """Project the raw two-message system and compare with its target list.

    Returns (derived system over {R0, R1e}, equivalence report).
    """
    raw = _drop(type1_raw_system(), drop_tags)
    # here the single private message splits as R1e = P1e + P2e + P3 and its
    # randomization layer carries both leak rates
    raw = (raw.substitute("P2p", {U2_LEAK: ONE})
              .substitute("P1p", {X_LEAK: ONE})
              .substitute("P3", {"R1e": ONE, "P1e": -ONE, "P2e": -ONE}))
    rates = ("R0", "R1e")
    derived = raw
    for var in order:
        derived = remove_redundant(derived.eliminate(var), nonneg_vars=rates)
    derived = derived.sorted()

    target = (load_fixture("type1_bound_target.txt")
              .substitute("R1", {"R1e": ONE, U2_LEAK: ONE, X_LEAK: ONE}))
    report = check_equivalence(derived, target, load_identities(),
                               a_name="derived", b_name="target",
                               nonneg_vars=rates)
    return derived, report


def base_system_for_appendix() -> IneqSystem:
    """Raw three-message system with the in-bin search depths projected out."""
    base = inner_raw_system().eliminate("R1dag").eliminate("P3dag")
    return remove_redundant(base).sorted()


def appendix_reduction(outer_layer_symbolic: bool = False) -> EquivalenceReport:
    """Reduce the inserted-layer system onto the base constraint system.

    With the default pinning (layer partition and bank rates set to zero,
    inserted-layer constants merged into the base names) the two systems are
    exactly equivalent.  With `outer_layer_symbolic` the layer rates stay as
    free nonnegative variables and are projected out instead; the resulting
    system is weaker, so only the base -> reduced direction certifies.
    """
    app = load_fixture("appendix_system.txt").rename_constants(APPENDIX_MERGE)
    if outer_layer_symbolic:
        app = app.eliminate("Pt2").eliminate("Qt2")
    else:
        app = app.substitute("Pt2", {}).substitute("Qt2", {})
    app = remove_redundant(app).sorted()
    base = base_system_for_appendix()
    return check_equivalence(base, app, a_name="base", b_name="reduced")
