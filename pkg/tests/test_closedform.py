import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsle import closedform as cf

RNG_SEED = 2024


def configs(n_points, min_gap=0.1, max_gap=3.0):
    gaps = st.lists(st.floats(min_gap, max_gap), min_size=n_points - 1, max_size=n_points - 1)
    return st.tuples(st.floats(-5, 5), gaps).map(lambda t: np.concatenate([[t[0]], t[0] + np.cumsum(t[1])]))


def fd_grad_log(Z, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (math.log(abs(Z(xp))) - math.log(abs(Z(xm)))) / (2 * h)
    return g


def test_params():
    assert cf.SLEParams(3).h == pytest.approx(0.5)
    assert cf.SLEParams(4).h == pytest.approx(0.25)
    assert cf.SLEParams(6).h == 0
    with pytest.raises(ValueError):
        cf.SLEParams(8)


def test_config_validation():
    with pytest.raises(ValueError):
        cf.check_config([0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        cf.check_config([1.0, 0.0])
    with pytest.raises(ValueError):
        cf.check_config([0.0, 1e-12])


def test_ising_one_pair():
    assert cf.z_ising([0.5, 2.0]) == pytest.approx(1 / 1.5, rel=1e-15)


def test_ising_two_pairs_by_hand():
    assert cf.z_ising([0, 1, 2, 4]) == pytest.approx(1 / 2 - 1 / 6 + 1 / 4, rel=1e-15)


def test_pairing_count():
    for n in range(0, 13, 2):
        assert len(cf.pair_partitions(n)) == math.prod(range(n - 1, 0, -2))


def test_pairing_sign_oracle():
    for n in range(2, 9, 2):
        for P in cf.pair_partitions(n):
            assert cf.pairing_sign(P) == cf.permutation_sign(P)


def test_permutation_sign_against_cycle_count():
    # parity via cycle decomposition of the word as a permutation
    for P in cf.pair_partitions(6):
        word = [x for p in sorted(P) for x in p]
        seen, cycles = set(), 0
        for i in range(len(word)):
            if i not in seen:
                cycles += 1
                k = i
                while k not in seen:
                    seen.add(k)
                    k = word[k]
        assert cf.permutation_sign(P) == (-1) ** (len(word) - cycles)


def test_pfaffian_matches_sum():
    rng = np.random.default_rng(RNG_SEED)
    for n in (2, 4, 6, 8, 10, 12):
        for _ in range(3):
            x = cf.random_config(rng, n)
            assert cf.z_ising_pfaffian(x) == pytest.approx(float(cf.z_ising(x)), rel=1e-10)


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(6, 6))
    m = a - a.T
    assert cf.pfaffian(m) ** 2 == pytest.approx(np.linalg.det(m), rel=1e-10)


def test_ising_positive():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(1000):
        n = 2 * int(rng.integers(1, 5))
        x = cf.random_config(rng, n, min_gap=0.05)
        assert cf.z_ising(x) > 0


def test_gff_one_pair():
    assert cf.z_gff([1.0, 5.0]) == pytest.approx(0.5, rel=1e-15)


def test_perco():
    assert cf.z_perco([-3.0, 0.0, 1.0, 7.0]) == 1.0
    assert not cf.grad_log_z_perco([0.0, 1.0]).any()


def test_batched_evaluation():
    rng = np.random.default_rng(5)
    xs = np.stack([cf.random_config(rng, 6) for _ in range(7)])
    for model in cf.MODELS:
        batch = cf.z_eval(model, xs)
        single = [float(cf.z_eval(model, x)) for x in xs]
        assert np.allclose(batch, single, rtol=1e-14)
        gb = cf.grad_log_z(model, xs)
        assert np.allclose(gb, [cf.grad_log_z(model, x) for x in xs], rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 4, 6, 8]).flatmap(configs), st.sampled_from(["ising", "gff"]))
def test_gradient_matches_fd(x, model):
    g = cf.grad_log_z(model, x)
    fd = fd_grad_log(cf.Z_FUNCS[model], x)
    assert np.allclose(g, fd, rtol=1e-6, atol=1e-6)


def test_ising_drift_one_pair():
    # kappa * d/dx_1 log (x_2 - x_1)^-1 = 3 / (x_2 - x_1)
    x = np.array([-0.3, 1.2])
    assert 3 * cf.grad_log_z_ising(x)[0] == pytest.approx(3 / 1.5, rel=1e-14)


def test_pde_ising_fixed_point():
    p = cf.params_for("ising")
    for i in range(4):
        assert cf.pde_residual(cf.z_ising, [-2, -1, 1, 2], p, i) <= 1e-5


def test_pde_gff_random():
    rng = np.random.default_rng(3)
    p = cf.params_for("gff")
    for _ in range(20):
        x = cf.random_config(rng, 4)
        for i in range(4):
            assert cf.pde_residual(cf.z_gff, x, p, i) <= 1e-5


def test_pde_perco_exact():
    x = [-1.0, 0.5, 2.0, 3.0]
    for i in range(4):
        assert cf.pde_residual(cf.z_perco, x, cf.params_for("perco"), i) == 0.0
        assert cf.pde_residual_exact_perco(x, i) == 0.0


def test_pde_wrong_kappa_fails():
    # sanity: the Ising function does not solve the system at another kappa
    assert cf.pde_residual(cf.z_ising, [-2, -1, 1, 2], cf.SLEParams(4.0), 0) > 1e-2


@pytest.mark.parametrize("model", ["ising", "gff"])
def test_pde_residual_second_order(model):
    # truncation error dominates at coarse steps and shrinks by ~4 when the step halves
    x = np.array([-1.7, -0.4, 0.9, 2.6])
    p = cf.params_for(model)
    r1 = cf.pde_residual(cf.Z_FUNCS[model], x, p, 1, rel_step=4e-2)
    r2 = cf.pde_residual(cf.Z_FUNCS[model], x, p, 1, rel_step=2e-2)
    assert 3.0 < r1 / r2 < 5.0


def test_covariance_examples():
    rng = np.random.default_rng(9)
    for model in cf.MODELS:
        p = cf.params_for(model)
        for n in (2, 4, 6):
            x = cf.random_config(rng, n)
            assert cf.covariance_check(cf.Z_FUNCS[model], x, p, 1, 5, 0, 1) <= 1e-12
    x = np.array([-2.0, -1.0, 1.0, 2.0])
    assert cf.covariance_check(cf.z_ising, x, cf.params_for("ising"), 3, 0, 0, 1) <= 1e-10
    y = np.array([-1.0, 0.0, 1.5, 4.0])
    assert cf.covariance_check(cf.z_gff, y, cf.params_for("gff"), 2, 1, 1, 3) <= 1e-9


def test_covariance_rejects_bad_maps():
    x = np.array([-4.0, -2.0, 1.0, 2.0])
    p = cf.params_for("gff")
    with pytest.raises(ValueError):
        cf.covariance_check(cf.z_gff, x, p, 2, 1, 1, 3)  # pole at -3 inside
    with pytest.raises(ValueError):
        cf.covariance_check(cf.z_gff, x, p, 1, 0, 0, -1)  # orientation reversing


def test_covariance_detects_wrong_weight():
    x = np.array([-1.0, 0.0, 1.5, 4.0])
    assert cf.covariance_check(cf.z_gff, x, cf.SLEParams(3.0), 2, 1, 1, 3) > 1e-3


def test_cascade_ising():
    res = cf.cascade_check("ising", [-1.0, 2.0], 2, 0.5, [1e-2, 1e-3, 1e-4])
    assert res["rel_errors"][-1] <= 1e-6
    assert all(r == pytest.approx(2.0, abs=0.1) for r in res["rates"])


def test_cascade_gff_converges_first_order():
    res = cf.cascade_check("gff", [-1.0, 2.0], 2, 0.5, [1e-2, 1e-3, 1e-4])
    assert res["rel_errors"][0] > res["rel_errors"][1] > res["rel_errors"][2]
    assert all(r == pytest.approx(1.0, abs=0.1) for r in res["rates"])


def test_cascade_perco_identity():
    res = cf.cascade_check("perco", [-1.0, 2.0], 1, -2.0, [1e-1, 1e-4])
    assert res["rel_errors"] == [0.0, 0.0]


def test_cascade_rejects_bad_xi():
    with pytest.raises(ValueError):
        cf.cascade_check("ising", [-1.0, 2.0], 2, 3.0, [1e-3])


def test_insert_pair_positions():
    x = cf.insert_pair([0.0, 10.0], 2, 5.0, 1.0)
    assert list(x) == [0.0, 4.5, 5.5, 10.0]
