import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from collapsim import diffusion as dif
from collapsim.diffusion import DiffusionParams
from collapsim.stats import wilson_interval

from conftest import born_seed


def test_diffusion_coefficient():
    assert dif.diffusion_coefficient(0.5) == 0.25
    assert dif.diffusion_coefficient(0.0) == 0.0
    assert dif.diffusion_coefficient(0.9) == pytest.approx(0.09, abs=1e-15)
    with pytest.raises(ValueError):
        dif.diffusion_coefficient(1.1)


def test_params_validation():
    p = DiffusionParams(intensity=4.0)
    assert p.max_time == 25.0
    assert p.max_steps == 250_000
    for bad in (dict(intensity=0), dict(dt=-1), dict(epsilon=0.02), dict(epsilon=0),
                dict(max_time=0)):
        with pytest.raises(ValueError):
            DiffusionParams(**bad)
    with pytest.warns(UserWarning, match="coarse step"):
        DiffusionParams(dt=0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        DiffusionParams()


def test_em_step_examples():
    p = DiffusionParams(intensity=1.0, dt=1e-4)
    assert dif.em_step(0.5, p, noise=0.0) == 0.5
    assert dif.em_step(0.5, p, noise=1.0) == pytest.approx(0.5 + math.sqrt(5e-5), abs=1e-15)
    assert dif.em_step(0.5, p, noise=1.0) == pytest.approx(0.507071, abs=1e-6)
    # inside the absorption threshold: no step at all
    assert dif.em_step(1e-9, p, noise=5.0) == 1e-9
    assert dif.em_step(1 - 1e-9, p, noise=-5.0) == 1 - 1e-9


def test_em_step_clamps():
    p = DiffusionParams()
    assert dif.em_step(0.01, p, noise=-1e6) == 0.0
    assert dif.em_step(0.99, p, noise=1e6) == 1.0


def test_em_step_vectorized_matches_scalar():
    p = DiffusionParams()
    x = np.linspace(0, 1, 11)
    g = np.random.default_rng(3).standard_normal(11)
    vec = dif.em_step(x, p, noise=g)
    assert np.array_equal(vec, [dif.em_step(a, p, noise=b) for a, b in zip(x, g)])


@pytest.mark.parametrize("drift", [0.0, 1.5])
def test_compiled_path_replays_python_steps(drift):
    p = DiffusionParams()
    rec = dif.run_to_absorption(0.4, p, np.random.default_rng(21), record_every=1, drift=drift)
    rng = np.random.default_rng(21)
    xs = [0.4]
    for _ in range(rec.steps):
        xs.append(dif.em_step(xs[-1], p, rng, drift=drift))
    assert np.array_equal(rec.path_samples[:, 1], xs)
    assert rec.endpoint == round(xs[-1])


def test_batch_kernel_matches_single_runs():
    p = DiffusionParams()
    rng = np.random.default_rng(4)
    singles = [dif.run_to_absorption(0.6, p, rng) for _ in range(20)]
    rng = np.random.default_rng(4)
    from collapsim import _kernels
    ends, steps = _kernels.single_batch(0.6, 20, p.noise_scale, 0.0, p.epsilon, p.max_steps, rng)
    assert [r.endpoint for r in singles] == ends.tolist()
    assert [r.steps for r in singles] == steps.tolist()


def test_run_to_absorption_boundaries():
    p = DiffusionParams()
    rng = np.random.default_rng(0)
    r0 = dif.run_to_absorption(0.0, p, rng)
    assert (r0.endpoint, r0.absorption_time, r0.steps) == (0, 0.0, 0)
    r1 = dif.run_to_absorption(1.0, p, rng)
    assert (r1.endpoint, r1.absorption_time) == (1, 0.0)
    with pytest.raises(ValueError):
        dif.run_to_absorption(1.5, p, rng)


def test_run_to_absorption_reports_unabsorbed():
    p = DiffusionParams(max_time=0.01)
    rec = dif.run_to_absorption(0.5, p, np.random.default_rng(0))
    assert rec.endpoint is None and not rec.absorbed
    assert rec.steps == 100
    ends, times = dif.simulate(0.5, 50, p, 0)
    assert np.all(ends == dif.UNABSORBED)


def test_path_samples():
    p = DiffusionParams()
    rec = dif.run_to_absorption(0.5, p, np.random.default_rng(8), record_every=50)
    t, x = rec.path_samples[:, 0], rec.path_samples[:, 1]
    assert x[0] == 0.5 and t[0] == 0.0
    assert t[-1] == pytest.approx(rec.absorption_time)
    assert np.all(np.diff(t) > 0)
    assert np.all((x >= 0) & (x <= 1))
    assert x[-1] < p.epsilon or x[-1] > 1 - p.epsilon


def test_simulate_independent_of_workers_and_prefix_stable():
    p = DiffusionParams(intensity=4.0)
    e1, t1 = dif.simulate(0.3, 3000, p, 99, workers=1)
    e3, t3 = dif.simulate(0.3, 3000, p, 99, workers=3)
    assert np.array_equal(e1, e3) and np.array_equal(t1, t3)
    e_short, t_short = dif.simulate(0.3, 1500, p, 99)
    assert np.array_equal(e_short, e1[:1500]) and np.array_equal(t_short, t1[:1500])


def test_martingale_one_step():
    p = DiffusionParams()
    n = 1_000_000
    x = dif.em_step(np.full(n, 0.3), p, np.random.default_rng(17))
    se = x.std(ddof=1) / math.sqrt(n)
    assert abs(x.mean() - 0.3) < 4 * se


def test_step_size_slows_near_endpoints():
    p = DiffusionParams()
    rng = np.random.default_rng(23)
    centers = np.array([0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98])
    ratios = []
    for c in centers:
        x = np.full(200_000, c)
        dx = np.abs(dif.em_step(x, p, rng) - x)
        ratios.append(dx.mean() / math.sqrt(c * (1 - c)))
    ratios = np.array(ratios)
    expected = p.noise_scale * math.sqrt(2 / math.pi)  # E|g| for a standard normal
    np.testing.assert_allclose(ratios, expected, rtol=0.01)


def test_hit_fraction_x03(mc_two_atom):
    n = 200_000
    ends, _ = mc_two_atom(0.3, n, born_seed(0.3))
    hits = int(np.count_nonzero(ends == 1))
    f = hits / n
    lo, hi = wilson_interval(hits, n, 0.997)
    assert lo <= 0.3 <= hi
    assert abs(f - 0.3) < 3 * math.sqrt(0.3 * 0.7 / n)


def test_mean_time_at_half(mc_two_atom):
    ends, times = mc_two_atom(0.5, 200_000, born_seed(0.5))
    assert np.all(ends[:100_000] >= 0)
    assert times[:100_000].mean() == pytest.approx(math.log(2), rel=0.05)


# -- finite-difference oracles ------------------------------------------------

@pytest.mark.parametrize("grid", [3, 4, 11, 100, 1001])
def test_bvp_hitting_is_linear(grid):
    r = dif.bvp_hitting_probability(grid)
    np.testing.assert_allclose(r[:, 1], r[:, 0], atol=1e-10)


def test_bvp_hitting_examples():
    r = dif.bvp_hitting_probability(5)
    assert r[2, 1] == pytest.approx(0.5, abs=1e-10)
    assert r[1, 1] == pytest.approx(0.25, abs=1e-10)


def test_bvp_rejects_small_grid():
    with pytest.raises(ValueError):
        dif.bvp_hitting_probability(2)
    with pytest.raises(ValueError):
        dif.bvp_mean_absorption_time(2)
    with pytest.raises(ValueError):
        dif.bvp_mean_absorption_time(11, intensity=0)


def test_bvp_mean_time_examples():
    r = dif.bvp_mean_absorption_time(1001, 1.0)
    assert r[500, 0] == 0.5
    assert r[500, 1] == pytest.approx(math.log(2), abs=1e-10)
    assert dif.bvp_mean_absorption_time(1001, 2.0)[500, 1] == pytest.approx(math.log(2) / 2, abs=1e-10)
    assert r[0, 1] == 0.0 and r[-1, 1] == 0.0


@pytest.mark.parametrize("grid", [11, 101, 801])
def test_bvp_mean_time_against_closed_form(grid):
    r = dif.bvp_mean_absorption_time(grid, 1.5)
    exact = dif.mean_absorption_time_exact(r[:, 0], 1.5)
    h = 1.0 / (grid - 1)
    interior = (r[:, 0] > 0.05) & (r[:, 0] < 0.95)
    assert np.max(np.abs(r[interior, 1] - exact[interior])) < max(h * h, 1e-11)


def test_closed_form_exit_time_solves_equation():
    # I x(1-x) t'' = -1 checked by central differences on the closed form
    x = np.linspace(0.05, 0.95, 19)
    h = 1e-4
    t = dif.mean_absorption_time_exact
    second = (t(x + h, 2.0) - 2 * t(x, 2.0) + t(x - h, 2.0)) / h ** 2
    np.testing.assert_allclose(2.0 * x * (1 - x) * second, -1.0, rtol=1e-5)


@given(st.floats(0, 1))
def test_exact_hitting_matches_bvp_interpolation(x):
    r = dif.bvp_hitting_probability(257)
    assert np.interp(x, r[:, 0], r[:, 1]) == pytest.approx(x, abs=1e-10)
