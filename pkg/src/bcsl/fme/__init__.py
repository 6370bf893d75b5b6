"""Exact Fourier-Motzkin elimination and Farkas certification toolkit."""

from .derivations import (
    APPENDIX_MERGE,
    INNER_ELIM_ORDER,
    TYPE1_ELIM_ORDER,
    appendix_reduction,
    base_system_for_appendix,
    derive_inner_bound,
    derive_type1_bound,
    inner_raw_system,
    load_fixture,
    load_identities,
    type1_raw_system,
)
from .farkas import (
    Certificate,
    DirectionReport,
    EquivalenceReport,
    certify,
    check_equivalence,
    remove_redundant,
)
from .system import Ineq, IneqSystem, is_constant_symbol

__all__ = [
    "APPENDIX_MERGE",
    "INNER_ELIM_ORDER",
    "TYPE1_ELIM_ORDER",
    "Certificate",
    "DirectionReport",
    "EquivalenceReport",
    "Ineq",
    "IneqSystem",
    "appendix_reduction",
    "base_system_for_appendix",
    "certify",
    "check_equivalence",
    "derive_inner_bound",
    "derive_type1_bound",
    "inner_raw_system",
    "is_constant_symbol",
    "load_fixture",
    "load_identities",
    "remove_redundant",
    "type1_raw_system",
]
