from __future__ import annotations

import random
from fractions import Fraction

import pytest

from samplers import nilpotent_closed, sparse_int
from symplie import catalog, coeff20, fharmonic
from symplie.errors import ConsistencyError, PreconditionError
from symplie.exterior import e
from symplie.hitchin import Q_def
from symplie.salamon import parse_form

NIL = catalog.nilpotent()
SOLV = catalog.solvable()
RSPEC, RSS = SOLV.exact


def test_residual_examples():
    assert fharmonic.residual(NIL.spec, NIL.ss, e(1, 3, 6)).is_fharmonic
    dfg = parse_form("e146+e236+e245")
    r = fharmonic.residual(NIL.spec, NIL.ss, dfg)
    assert r.is_closed and not r.is_fharmonic
    m_class = parse_form("e125-e345") * 3
    assert fharmonic.residual(RSPEC, RSS, m_class).is_fharmonic


def test_residual_float_mode_uses_tolerance():
    phi = e(1, 3, 6) * 1.0 + parse_form("e146+e236+e245") * 1e-14
    assert fharmonic.residual(NIL.spec, NIL.ss, phi).is_fharmonic
    phi = e(1, 3, 6) * 1.0 + parse_form("e146+e236+e245") * 1e-3
    assert not fharmonic.residual(NIL.spec, NIL.ss, phi).is_fharmonic


def test_nilpotent_system_examples():
    assert fharmonic.nilpotent_system_residual(coeff20.as_list({"F": 1, "G": 1})) == (0, 0, 0, 0)
    assert fharmonic.nilpotent_system_residual(coeff20.as_list({"D": 1, "F": 1, "G": 1})) == (1, 0, 0, 0)
    assert fharmonic.nilpotent_system_residual([0] * 20) == (0, 0, 0, 0)


def test_nilpotent_system_needs_closed_input():
    with pytest.raises(PreconditionError, match="H=0"):
        fharmonic.nilpotent_system_residual(coeff20.as_list({"H": 1}))


def test_solvable_system_examples():
    c = coeff20.as_list({"M": 2, "N": -1, "S": 1, "T": 3})
    assert fharmonic.solvable_system_residual(c) == (0, 0, 0, 0)
    c = coeff20.as_list({"A": 1, "B": 1, "M": 1})
    assert fharmonic.solvable_system_residual(c)[0] == -1
    assert fharmonic.solvable_system_residual([0] * 20) == (0, 0, 0, 0)
    with pytest.raises(PreconditionError, match="A-B=0"):
        fharmonic.solvable_system_residual(coeff20.as_list({"A": 1}))


def test_solvable_Q_example():
    c = coeff20.as_list({"M": 1, "T": 1})
    Q, ok = fharmonic.solvable_Q_sign_check(c, RSS)
    assert Q == 16 and ok
    assert fharmonic.solvable_Q_sign_check([0] * 20)[0] == 0


def test_nilpotent_locus_examples():
    v = fharmonic.nilpotent_locus({"F": 1, "G": 1})
    assert v.in_LF and v.stratum == fharmonic.STRATA[0]
    v = fharmonic.nilpotent_locus({"D": 1, "F": 1})
    assert v.in_LF and v.stratum == fharmonic.STRATA[2]
    v = fharmonic.nilpotent_locus({"D": 1, "F": 1, "G": 1})
    assert not v.in_LF and not v.in_PLF


def test_locus_rejects_unknown_params():
    with pytest.raises(KeyError):
        fharmonic.nilpotent_locus({"A": 1})


def test_plf_implies_lf_enforced():
    with pytest.raises(ConsistencyError):
        fharmonic.LocusVerdict(in_LF=False, in_PLF=True)


def test_locus_consistent_with_sampled_representatives():
    # PL_F inside L_F on random classes; a PL_F class has every sampled representative harmonic
    rng = random.Random(0)
    for _ in range(300):
        c = nilpotent_closed(rng)
        params = fharmonic.nilpotent_class_params(c)
        verdict = fharmonic.nilpotent_locus(params)
        assert verdict.in_LF or not verdict.in_PLF
        harmonic = all(x == 0 for x in fharmonic.nilpotent_system_residual(c))
        if verdict.in_PLF:
            assert harmonic
        if harmonic:
            assert verdict.in_LF


def test_shminus_table_member():
    v = fharmonic.nilpotent_primitive_locus("SHminus3", {"D": 1, "F": 1, "G": 0, "I": 2, "K": 1, "M": 0})
    assert v.in_LF and v.in_PLF
    v = fharmonic.nilpotent_primitive_locus("SH-", {"D": 1, "F": 1, "G": 1})
    assert not v.in_LF


def test_primitive_Q_nonnegative_on_locus():
    rng = random.Random(1)
    seen = 0
    for _ in range(2000):
        d = {n: sparse_int(rng) for n in "ABCDEFGIKM"}
        if d["D"] * d["F"] * d["G"] or d["I"] * d["F"] * d["G"] or d["D"] * d["F"] * d["M"] \
                or d["D"] * d["G"] * d["K"]:
            continue
        c = coeff20.as_list(d)
        phi = coeff20.to_form(c)
        assert fharmonic.residual(NIL.spec, NIL.ss, phi).is_fharmonic
        q4 = Fraction(Q_def(NIL.ss, phi)) / 4
        assert q4 == fharmonic.nilpotent_primitive_Q_quarter(c)
        assert q4 >= 0
        seen += 1
    assert seen > 500


def test_solvable_locus():
    v = fharmonic.solvable_locus("PH3")
    assert v.in_LF and not v.in_PLF


def test_search_finds_representatives():
    # class of F = G = 1 (stratum D = 0, P^2 + FG != 0)
    report_coords = _h3_coords(coeff20.as_list({"F": 1, "G": 1}))
    res = fharmonic.find_representative(NIL.spec, NIL.ss, report_coords, "H3", seed=0)
    assert res.success and res.residual <= 1e-10


def test_search_solvable_class():
    from symplie.cohomology import cohomology

    rep = cohomology(RSPEC, RSS, "H3")
    res = fharmonic.find_representative(RSPEC, RSS, [1, -2, 1, 3][: rep.dimension], "H3", seed=1)
    assert res.success


def test_search_fails_off_locus():
    coords = _h3_coords(coeff20.as_list({"D": 1, "F": 1, "G": 1}))
    res = fharmonic.find_representative(NIL.spec, NIL.ss, coords, "H3", seed=0, restarts=5)
    assert not res.success
    assert res.residual > 1e-3


def test_search_is_deterministic():
    coords = _h3_coords(coeff20.as_list({"F": 1, "G": 1, "D": 0, "B": 1}))
    a = fharmonic.find_representative(NIL.spec, NIL.ss, coords, seed=3)
    b = fharmonic.find_representative(NIL.spec, NIL.ss, coords, seed=3)
    assert a.to_dict() == b.to_dict()


def test_q_probe_separates_perfect_locus():
    perfect = _h3_coords(coeff20.as_list({"D": 1, "F": 1}))
    assert fharmonic.nilpotent_locus({"D": 1, "F": 1}).in_PLF
    assert fharmonic.q_constancy_probe(NIL.spec, NIL.ss, perfect)["spread"] == pytest.approx(0, abs=1e-9)
    loose = _h3_coords(coeff20.as_list({"F": 1, "G": 1}))
    assert not fharmonic.nilpotent_locus({"F": 1, "G": 1}).in_PLF
    assert fharmonic.q_constancy_probe(NIL.spec, NIL.ss, loose)["spread"] > 1e-3


def _h3_coords(c):
    from symplie.cohomology import class_coordinates, cohomology

    return class_coordinates(cohomology(NIL.spec, NIL.ss, "H3"), coeff20.to_form(c))
