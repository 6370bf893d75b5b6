"""Bound evaluation, the single-auxiliary collapse, and frontier search."""

import itertools

import numpy as np
import pytest

from bcsl.channel_core import conditional_mi, induced_joint
from bcsl.errors import PreconditionError, UsageError, ValidationError
from bcsl.orderings import is_less_noisy, is_more_capable
from bcsl.regions import (AuxJoint, BoundId, FactorBlocks, RateTuple,
                          SearchConfig, check_markov, eval_bound,
                          eval_cor3_match, max_weighted_rate, parse_mi_name,
                          polytope_lp)

from conftest import (cascade_channel, identical_y1_y3_channel,
                      noiseless_identical_channel, random_channel)


@pytest.fixture(scope="module")
def cascade():
    return cascade_channel(0.1, 0.08, 0.08)


@pytest.fixture(scope="module")
def mc13(cascade):
    return is_more_capable(cascade, 1, 3, seed=0)


@pytest.fixture(scope="module")
def ln_reports(cascade):
    return [is_less_noisy(cascade, 1, 3, seed=0),
            is_less_noisy(cascade, 2, 3, seed=0)]


class TestAuxJoint:
    def test_sampler_satisfies_all_chains(self, rng):
        for _ in range(10):
            aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
            assert all(r <= 1e-12 for _, r in check_markov(aux))

    def test_independent_variables_zero_residual(self):
        p = np.full((2, 2, 2, 2), 1 / 16)
        assert all(r == pytest.approx(0.0, abs=1e-12)
                   for _, r in check_markov(AuxJoint(2, 2, 2, 2, p)))

    def test_copy_aux_violates_first_chain(self):
        # U1 = X, U2 independent of both: I(U1; X | U2) = H(X|U2) > 0
        p = np.zeros((2, 2, 1, 2))
        for u1 in range(2):
            for u2 in range(2):
                p[u1, u2, 0, u1] = 0.25
        residuals = dict(check_markov(AuxJoint(2, 2, 1, 2, p)))
        assert residuals["U1->U2->(U3,X)"] > 0.5

    def test_invalid_pmf_rejected(self):
        with pytest.raises(ValidationError):
            AuxJoint(2, 2, 2, 2, np.full((2, 2, 2, 2), 0.9 / 16))

    def test_cardinality_floor(self):
        with pytest.raises(UsageError):
            FactorBlocks.uniform(3, 2, 3, 2)


class TestRateTuple:
    def test_invariants(self):
        RateTuple(0.1, 0.2, 0.1, 0.3, 0.0)
        with pytest.raises(ValidationError):
            RateTuple(-0.1, 0, 0, 0, 0)
        with pytest.raises(ValidationError):
            RateTuple(0, 0.1, 0.2, 0, 0)   # R1e > R1


class TestEvalBound:
    def test_rhs_matches_brute_force(self, rng, cascade):
        # every RHS equals an independent recomputation from the raw joint
        for _ in range(5):
            aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
            j = induced_joint(cascade, aux)
            for bound in (BoundId.INNER_3DM, BoundId.OUTER_NO_SECRECY,
                          BoundId.INNER_TYPE1):
                pol = eval_bound(bound, cascade, aux)
                from bcsl.regions import _BOUND_TABLES
                templates = _BOUND_TABLES[bound][0]
                for tag, _, terms in templates:
                    want = sum(s * conditional_mi(j, *parse_mi_name(nm))
                               for s, nm in terms)
                    assert pol.row(tag).rhs == pytest.approx(want, abs=1e-10)

    def test_label_permutation_invariance(self, rng, cascade):
        aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
        perm = [2, 0, 1]
        permuted = AuxJoint(2, 3, 3, 2, aux.p[:, perm, :, :])
        a = eval_bound(BoundId.INNER_3DM, cascade, aux)
        b = eval_bound(BoundId.INNER_3DM, cascade, permuted)
        for ra, rb in zip(a.rows, b.rows):
            assert ra.rhs == pytest.approx(rb.rhs, abs=1e-12)

    def test_u3_constant_zeroes_common_rate(self, rng, cascade):
        aux = AuxJoint.random_factorized(rng, 1, 2, 1, 2)
        pol = eval_bound(BoundId.INNER_3DM, cascade, aux)
        assert pol.row("common").rhs == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_secrecy_y1_equals_y3(self, rng):
        ch = identical_y1_y3_channel(rng)
        aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
        pol = eval_bound(BoundId.INNER_3DM, ch, aux)
        r1e = min(pol.row("r1e_via_y2").rhs, pol.row("r1e_via_y1").rhs)
        assert r1e <= 1e-9
        assert abs(pol.row("r2e_cap").rhs) <= 1e-9
        assert abs(pol.row("joint_secrecy").rhs) <= 1e-9

    def test_both_r1e_ceilings_emitted(self, rng, cascade):
        aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
        pol = eval_bound(BoundId.INNER_3DM, cascade, aux)
        tags = {r.tag for r in pol.rows}
        assert {"r1e_via_y2", "r1e_via_y1"} <= tags
        binding = min(pol.row("r1e_via_y2").rhs, pol.row("r1e_via_y1").rhs)
        assert binding == min(r.rhs for r in pol.rows
                              if r.tag.startswith("r1e_via"))

    def test_markov_violation_rejected(self, cascade):
        p = np.zeros((2, 1, 2, 2))
        for u in range(2):
            p[u, 0, u, u] = 0.5     # U2 constant, U3 = X = U1
        with pytest.raises(ValidationError):
            eval_bound(BoundId.INNER_3DM, cascade, AuxJoint(2, 1, 2, 2, p))

    def test_outer_needs_ordering_report(self, rng, cascade, mc13):
        aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
        with pytest.raises(PreconditionError):
            eval_bound(BoundId.OUTER_3DM, cascade, aux)
        pol = eval_bound(BoundId.OUTER_3DM, cascade, aux,
                         ordering_reports=[mc13])
        assert pol.rows
        pol2 = eval_bound(BoundId.OUTER_3DM, cascade, aux, override=True)
        assert any("condition unverified" in n for n in pol2.notes)

    def test_secrecy_rows_never_enlarge_projection(self, rng, cascade, mc13):
        # LP inclusion: max of any (R0,R1,R2) objective under Outer3DM is
        # at most the same max under OuterNoSecrecy
        for _ in range(5):
            aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
            full = eval_bound(BoundId.OUTER_3DM, cascade, aux,
                              ordering_reports=[mc13])
            nosec = eval_bound(BoundId.OUTER_NO_SECRECY, cascade, aux)
            for _ in range(5):
                w = np.zeros(5)
                w[[0, 1, 3]] = rng.random(3)
                got_full = polytope_lp(full, w)
                if got_full is None:
                    continue    # empty per-aux slice is trivially included
                got_nosec = polytope_lp(nosec, w)
                assert got_nosec is not None
                assert got_full[1] <= got_nosec[1] + 1e-8


def _vertex_enum_max(pol, w):
    """Oracle: enumerate basic feasible points of the 5-D polytope."""
    idx = {s: i for i, s in enumerate(("R0", "R1", "R1e", "R2", "R2e"))}
    a_rows = []
    b_rows = []
    for row in pol.rows:
        coeff = np.zeros(5)
        for s, c in row.coeffs:
            coeff[idx[s]] = c
        a_rows.append(coeff)
        b_rows.append(row.rhs)
    for e, r in (("R1e", "R1"), ("R2e", "R2")):
        coeff = np.zeros(5)
        coeff[idx[e]], coeff[idx[r]] = 1.0, -1.0
        a_rows.append(coeff)
        b_rows.append(0.0)
    for i in range(5):
        coeff = np.zeros(5)
        coeff[i] = -1.0
        a_rows.append(coeff)
        b_rows.append(0.0)
    for s in set(idx) - set(pol.free_symbols):
        coeff = np.zeros(5)
        coeff[idx[s]] = 1.0
        a_rows.append(coeff)
        b_rows.append(0.0)
        a_rows.append(-coeff)
        b_rows.append(0.0)
    a = np.array(a_rows)
    b = np.array(b_rows)
    best = -np.inf
    for combo in itertools.combinations(range(len(a_rows)), 5):
        sub = a[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        v = np.linalg.solve(sub, b[list(combo)])
        if np.all(a @ v <= b + 1e-8):
            best = max(best, float(np.asarray(w) @ v))
    return best


class TestPolytopeLp:
    def test_matches_vertex_enumeration(self, rng, cascade):
        aux = AuxJoint.random_factorized(rng, 2, 3, 3, 2)
        pol = eval_bound(BoundId.INNER_3DM, cascade, aux)
        for _ in range(4):
            w = rng.random(5)
            _, got = polytope_lp(pol, w)
            want = _vertex_enum_max(pol, w)
            assert got == pytest.approx(want, abs=1e-7)


class TestCor3Match:
    def test_cascade_collapse(self, rng, cascade, ln_reports):
        for _ in range(10):
            pux = rng.dirichlet(np.ones(4)).reshape(2, 2)
            rep = eval_cor3_match(cascade, pux, ordering_reports=ln_reports)
            assert rep.matched, rep.to_dict()

    def test_u_constant(self, cascade, ln_reports):
        pux = np.array([[0.5, 0.5]])
        rep = eval_cor3_match(cascade, pux, ordering_reports=ln_reports)
        rows = {r.tag: r for r in rep.rows}
        assert rows["common"].region_rhs == pytest.approx(0.0, abs=1e-12)
        assert rep.matched

    def test_y1_equals_y3_kills_r1e(self, rng):
        ch = identical_y1_y3_channel(rng)
        pux = rng.dirichlet(np.ones(4)).reshape(2, 2)
        rep = eval_cor3_match(ch, pux, override=True)
        rows = {r.tag: r for r in rep.rows}
        assert rows["r1e_via_y1"].region_rhs <= 1e-9

    def test_precondition(self, cascade):
        with pytest.raises(PreconditionError):
            eval_cor3_match(cascade, np.full((2, 2), 0.25))


class TestMaxWeightedRate:
    def test_common_capacity_noiseless(self):
        ch = noiseless_identical_channel(2)
        rate, aux, value = max_weighted_rate(
            BoundId.INNER_3DM, ch, [1, 0, 0, 0, 0],
            SearchConfig(restarts=8, iters=40, seed=2))
        assert value == pytest.approx(1.0, abs=0.02)

    def test_r2e_zero_when_y1_equals_y3(self, rng):
        ch = identical_y1_y3_channel(rng)
        rate, aux, value = max_weighted_rate(
            BoundId.INNER_3DM, ch, [0, 0, 0, 0, 1],
            SearchConfig(restarts=4, iters=10, seed=1))
        assert value == pytest.approx(0.0, abs=1e-9)

    def test_deterministic(self, cascade):
        cfg = SearchConfig(restarts=3, iters=8, seed=9)
        a = max_weighted_rate(BoundId.INNER_3DM, cascade, [1, 1, 0, 0, 0], cfg)
        b = max_weighted_rate(BoundId.INNER_3DM, cascade, [1, 1, 0, 0, 0], cfg)
        assert a[2] == b[2]
        assert np.array_equal(a[1].p, b[1].p)

    def test_weights_validation(self, cascade):
        with pytest.raises(UsageError):
            max_weighted_rate(BoundId.INNER_3DM, cascade, [0, 0, 0, 0, 0])
