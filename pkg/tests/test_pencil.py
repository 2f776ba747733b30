import numpy as np
import pytest

from dsmkit import (
    EigenPair,
    PHPencil,
    eta_s,
    eta_sd,
    experiment_table,
    gen_eigpair,
    gen_pencil,
    mapping_data,
    parse_blocks,
    reconstruct_perturbation,
)
from dsmkit.errors import DegenerateInputError, GenerationError, StructureError
from dsmkit.pencil import ETA_S_COMBOS, ETA_SD_COMBOS, blocks_to_string
from helpers import crandn

WORKED = PHPencil(J=[[1j]], R=[[1]], E=[[1]], B=[[1]], S=[[1]])
EP = EigenPair(1j, [1], [1], [0])


def pencil_for(blocks, seed=5, n=3, m=2):
    if blocks in ("JB", "EB", "JEB"):
        return gen_pencil(n, m, seed=seed, r_rank=n - 1)
    return gen_pencil(n, m, seed=seed)


def test_mapping_data_worked_example():
    x, y, z, w = mapping_data(WORKED, EP)
    assert np.allclose(x, [1, 0])
    assert np.allclose(y, [-1 + 2j])
    assert np.allclose(z, [1])
    assert np.allclose(w, [-1 - 2j, 1])


def test_mapping_data_zero_pencil():
    p = PHPencil(J=np.zeros((2, 2)), R=np.zeros((2, 2)), E=np.zeros((2, 2)),
                 B=np.zeros((2, 1)), S=np.eye(1))
    ep = EigenPair(0.5j, [1, 0], [0, 1], [0])
    x, y, z, w = mapping_data(p, ep)
    assert np.allclose(y, 0) and np.allclose(w[:2], 0)


def test_mapping_data_compatibility_identity():
    # u3 = 0 forces x*w = y*z by the pencil symmetries
    rng = np.random.default_rng(0)
    for seed in range(10):
        p = gen_pencil(4, 2, seed=seed)
        u1, u2 = crandn(rng, 4), crandn(rng, 4)
        ep = EigenPair(1j * rng.uniform(0.2, 2.0), u1, u2, np.zeros(2))
        x, y, z, w = mapping_data(p, ep)
        assert abs(np.vdot(x, w) - np.vdot(y, z)) <= 1e-10 * max(
            1.0, np.linalg.norm(x) * np.linalg.norm(w)
        )


def test_eta_sd_jreb_worked_example():
    res = eta_sd(WORKED, EP, "JREB")
    assert res.finite
    assert res.eta_lower == pytest.approx(np.sqrt(3.5), abs=1e-12)
    assert res.eta_upper == pytest.approx(np.sqrt(6), abs=1e-12)
    assert np.allclose(res.H1, [[-1 + 2j]]) and np.allclose(res.H2, [[1]])


def test_eta_sd_jr_worked_example():
    p0 = PHPencil(J=[[1j]], R=[[1]], E=[[1]], B=[[0]], S=[[1]])
    res = eta_sd(p0, EP, "JR")
    assert res.finite and res.exact
    assert res.eta_lower == pytest.approx(np.sqrt(5), abs=1e-12)
    assert res.eta_upper == pytest.approx(np.sqrt(5), abs=1e-12)


def test_eta_s_jb_worked_example():
    # J=i, E=1 so that lam E contributes i: ty = 2i, w1 = -2i
    p = PHPencil(J=[[1j]], R=[[0]], E=[[1]], B=[[1]], S=[[1]])
    res = eta_s(p, EP, "JB")
    assert res.finite and res.exact
    assert np.allclose(res.H1, [[2j]]) and np.allclose(res.H2, [[1]])
    assert res.eta_lower == pytest.approx(np.sqrt(5), abs=1e-12)


def test_eta_infinite_cases():
    ep3 = EigenPair(1j, [1], [1], [0.5])
    res = eta_sd(WORKED, ep3, "JREB")
    assert not res.finite and res.eta_lower == np.inf and res.eta_upper == np.inf
    # EB needs R u1 = 0
    res = eta_s(WORKED, EP, "EB")
    assert not res.finite and not res.conditions_report["R_u1_zero"]
    # RB needs u1*(J + lam E) u1 = 0
    res = eta_sd(WORKED, EP, "RB")
    assert not res.finite and not res.conditions_report["u1_isotropic"]
    # JR needs B* u1 = 0
    res = eta_sd(WORKED, EP, "JR")
    assert not res.finite and not res.conditions_report["B_adj_u1_zero"]


def test_eta_rejects_zero_lambda_and_prior_work():
    with pytest.raises(DegenerateInputError):
        eta_sd(WORKED, EigenPair(0, [1], [1], [0]), "JREB")
    with pytest.raises(ValueError):
        eta_s(WORKED, EP, "JR")
    with pytest.raises(ValueError):
        eta_sd(WORKED, EP, "JE")
    with pytest.raises(ValueError):
        parse_blocks("JX")


def test_delegation_identity():
    for blocks in ("JB", "EB", "JEB"):
        p = pencil_for(blocks)
        ep = gen_eigpair(p, 3, blocks)
        a = eta_sd(p, ep, blocks)
        b = eta_s(p, ep, blocks)
        assert a.eta_lower == b.eta_lower and a.eta_upper == b.eta_upper
        assert np.array_equal(a.H1, b.H1)
        assert a.variant == "sd" and b.variant == "s"


def test_eta_scaling_invariance():
    for blocks, variant in [("JREB", "sd"), ("JR", "sd"), ("RB", "sd"), ("JEB", "s")]:
        p = pencil_for(blocks, seed=9)
        ep = gen_eigpair(p, 21, blocks)
        compute = eta_sd if variant == "sd" else eta_s
        a = compute(p, ep, blocks)
        rng = np.random.default_rng(1)
        c = crandn(rng)
        b = compute(p, ep.scaled(c), blocks)
        assert b.eta_lower == pytest.approx(a.eta_lower, rel=1e-10)
        assert b.eta_upper == pytest.approx(a.eta_upper, rel=1e-10)


def test_gen_pencil_determinism_and_validity():
    a = gen_pencil(4, 2, seed=123)
    b = gen_pencil(4, 2, seed=123)
    for blk in ("J", "R", "E", "B", "S"):
        assert np.array_equal(getattr(a, blk), getattr(b, blk))
    assert not np.array_equal(a.J, gen_pencil(4, 2, seed=124).J)
    for seed in range(100):
        rep = gen_pencil(4, 2, seed=seed).validate()
        assert all(rep.values()), rep


def test_gen_pencil_rank_knobs():
    p = gen_pencil(4, 2, seed=1, r_rank=2)
    assert np.linalg.matrix_rank(p.R, tol=1e-10) == 2
    assert all(p.validate().values())


def test_pencil_validate_catches_bad_blocks():
    p = gen_pencil(3, 2, seed=0)
    bad = PHPencil(J=p.J, R=p.R - 10 * np.eye(3), E=p.E, B=p.B, S=p.S)
    rep = bad.validate()
    assert not rep["R_psd"] and rep["J_skew_hermitian"]


def test_eigenpair_validation():
    with pytest.raises(StructureError):
        EigenPair(1.0 + 0.5j, [1], [1], [0])
    ep = EigenPair(2j, [1], [1], [0])
    assert ep.lam == 2j
    with pytest.raises(DegenerateInputError):
        EigenPair(1j, [0], [0], [0])


@pytest.mark.parametrize("blocks", sorted(blocks_to_string(b) for b in ETA_SD_COMBOS | ETA_S_COMBOS))
def test_gen_eigpair_produces_finite(blocks):
    p = pencil_for(blocks, seed=2)
    variantset = ETA_S_COMBOS if parse_blocks(blocks) in ETA_S_COMBOS else ETA_SD_COMBOS
    for seed in range(10):
        ep = gen_eigpair(p, seed, blocks)
        assert np.linalg.norm(ep.u3) == 0
        res = eta_sd(p, ep, blocks) if parse_blocks(blocks) in ETA_SD_COMBOS else eta_s(p, ep, blocks)
        assert res.finite


def test_gen_eigpair_unsatisfiable():
    p = gen_pencil(2, 2, seed=0)  # R nonsingular: ker(R) empty
    with pytest.raises(GenerationError):
        gen_eigpair(p, 0, "EB")


def test_reconstruction_worked_example():
    res = eta_sd(WORKED, EP, "JREB")
    pb = reconstruct_perturbation(WORKED, EP, "JREB", res)
    assert np.allclose(pb.dR, [[1.0]])  # minus the Hermitian part of -1+2i
    assert np.allclose(pb.dJ, [[1j]]) and np.allclose(pb.dE, [[1.0]]) and np.allclose(pb.dB, [[1.0]])
    m_mat, n_mat = WORKED.assemble()
    dm, dn = pb.delta_mn(1, 1)
    resid = ((m_mat - dm) + 1j * (n_mat - dn)) @ EP.u
    assert np.linalg.norm(resid) <= 1e-12
    assert res.eta_lower - 1e-12 <= pb.norm() <= res.eta_upper + 1e-12


def test_reconstruction_exact_combos_hit_upper():
    for blocks, variant in [("JR", "sd"), ("JRB", "sd"), ("RB", "sd"),
                            ("JB", "s"), ("RB", "s"), ("EB", "s"), ("JEB", "s")]:
        p = pencil_for(blocks, seed=11)
        ep = gen_eigpair(p, 31, blocks)
        res = (eta_sd if variant == "sd" else eta_s)(p, ep, blocks)
        pb = reconstruct_perturbation(p, ep, blocks, res)
        assert pb.norm() == pytest.approx(res.eta_upper, rel=1e-10)
        if "B" not in blocks:
            assert np.all(pb.dB == 0)
        if "J" not in blocks:
            assert np.all(pb.dJ == 0)


def test_reconstruction_bracket_combos_land_inside():
    for blocks in ("RE", "JRE", "REB", "JREB"):
        p = pencil_for(blocks, seed=13)
        ep = gen_eigpair(p, 33, blocks)
        res = eta_sd(p, ep, blocks)
        pb = reconstruct_perturbation(p, ep, blocks, res)
        assert res.eta_lower - 1e-10 <= pb.norm() <= res.eta_upper + 1e-10


def test_experiment_table_shapes():
    p = gen_pencil(4, 2, seed=3)
    lams = [0.138j, 0.51j, 0.895j]
    rows = experiment_table(p, lams, 7, "JREB")
    assert len(rows) == 3
    assert all(r["finite"] for r in rows)
    assert all(r["eta_lower"] <= r["eta_upper"] + 1e-12 for r in rows)
    assert experiment_table(p, [], 7, "JREB") == []
    rows = experiment_table(p, [0.0], 7, "JREB")
    assert not rows[0]["finite"] and rows[0]["error"]


def test_experiment_table_fixed_u_across_lambdas():
    p = gen_pencil(4, 2, seed=3)
    rows = experiment_table(p, [0.5j, 1.5j], 7, "JR")
    assert all(r["finite"] for r in rows)
