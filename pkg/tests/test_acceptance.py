"""Acceptance gate: the eleven headline criteria, one test each.

Run with ``pytest -v tests/test_acceptance.py`` to get one pass/fail
line per criterion. Every oracle here is coded independently of the
library internals it checks.
"""

import cmath
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from arraycov.coverage import (
    GainMap,
    coverage_cdf,
    mae_per_theta_cut,
    max_gain_over_plan,
    percentile_gain,
)
from arraycov.deembed import BeamWindow, apply_losses, estimate_losses
from arraycov.grid import Direction, SphericalGrid, make_regular_grid, make_uniform_sphere_grid
from arraycov.ioutil import write_json
from arraycov.materials import (
    Layer,
    LayerStack,
    builtin_material,
    layered_reflection,
    penetration_depth_mm,
    reflection_db,
    skin_thickness_delta,
)
from arraycov.pattern import ElementPatternSet, save_pattern_csv
from arraycov.synth import (
    SubArraySpec,
    SynthesisPlan,
    WeightVector,
    enumerate_weights,
    synthesize,
)

# implementation losses of the eight measured ports, dB
PORT_LOSSES_DB = {
    "1V": 10.7,
    "2H": 10.4,
    "3V": 10.3,
    "4H": 11.0,
    "5V": 12.4,
    "6H": 12.1,
    "7V": 13.1,
    "8H": 14.4,
}


def random_pattern_set(grid, feeds, seed, single_pol=False):
    rng = np.random.default_rng(seed)
    shape = (len(feeds), len(grid), 2)
    gains = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if single_pol:
        gains[:, :, 1] = 0.0
    return ElementPatternSet(grid, tuple(feeds), gains)


def test_c01_enumeration_counts_512_per_subarray_2048_total():
    start = time.perf_counter()
    spec = SubArraySpec("s", (0, 1, 2, 3))
    weights = enumerate_weights(spec, 3)
    assert len(weights) == 512
    plan = SynthesisPlan(
        tuple(SubArraySpec(f"s{i}", (4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3))
              for i in range(4)),
        bits=3,
    )
    assert plan.realization_count == 2048
    assert time.perf_counter() - start < 1.0


def test_c02_thin_film_reflection_minus_28_4_db():
    start = time.perf_counter()
    film = LayerStack((Layer(builtin_material("ldpe_film"), 0.1),))
    level = reflection_db(layered_reflection(film, 28.0, 0.0))
    assert level == pytest.approx(-28.4, abs=0.3)
    assert time.perf_counter() - start < 1.0


def test_c03_skin_thickness_delta_0_14_db():
    start = time.perf_counter()
    skin = builtin_material("skin_28ghz")
    foam = builtin_material("styrofoam")
    assert 0.92 <= penetration_depth_mm(skin, 28.0) <= 0.95
    thick = LayerStack((Layer(skin, 5.0),), substrate=foam)
    thin = LayerStack((Layer(skin, 1.5),), substrate=foam)
    delta = skin_thickness_delta(thick, thin, 28.0)
    assert abs(delta) == pytest.approx(0.14, abs=0.1)
    assert time.perf_counter() - start < 1.0


def test_c04_coherent_combining_plus_6_02_db():
    start = time.perf_counter()
    grid = make_uniform_sphere_grid(200)
    rng = np.random.default_rng(40)
    one = (
        rng.uniform(0.5, 2.0, size=(len(grid), 2))
        * np.exp(1j * rng.uniform(0, 2 * np.pi, size=(len(grid), 2)))
    )
    pset = ElementPatternSet(
        grid, ("e0", "e1", "e2", "e3"), np.broadcast_to(one, (4,) + one.shape)
    )
    spec = SubArraySpec("s", (0, 1, 2, 3))
    zero_phase = WeightVector((0.0, 0.0, 0.0, 0.0), 0.5)
    combined = synthesize(pset, spec, zero_phase)
    single_db = 10 * np.log10((np.abs(one) ** 2).sum(axis=1))
    combined_db = combined.power_gain_db()
    expected = 10 * math.log10(4.0)  # +6.02 dB
    np.testing.assert_allclose(combined_db - single_db, expected, atol=1e-6)
    assert time.perf_counter() - start < 1.0


def test_c05_array_factor_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(50)
    n_el, n_dir, n_weights = 4, 20, 50
    positions_wl = rng.uniform(-2.0, 2.0, size=(n_el, 3))
    theta = rng.uniform(5.0, 175.0, size=n_dir)
    phi = rng.uniform(0.0, 360.0, size=n_dir)
    grid = SphericalGrid(theta, phi, np.full(n_dir, 4 * math.pi / n_dir), kind="scatter")

    tr = np.radians(theta)
    pr = np.radians(phi)
    unit = np.stack([np.sin(tr) * np.cos(pr), np.sin(tr) * np.sin(pr), np.cos(tr)], axis=1)
    geo_phase = 2 * np.pi * (positions_wl @ unit.T)  # (n_el, n_dir)
    gains = np.zeros((n_el, n_dir, 2), dtype=np.complex128)
    gains[:, :, 0] = np.exp(1j * geo_phase)
    pset = ElementPatternSet(grid, ("e0", "e1", "e2", "e3"), gains)
    spec = SubArraySpec("s", (0, 1, 2, 3))

    worst = 0.0
    for _ in range(n_weights):
        phases = (0.0,) + tuple(rng.uniform(0.0, 360.0, size=n_el - 1))
        weight = WeightVector(phases, 1.0 / math.sqrt(n_el))
        synth_db = synthesize(pset, spec, weight).power_gain_db()
        for d in range(n_dir):
            acc = 0 + 0j
            for i in range(n_el):
                total = math.radians(phases[i]) + geo_phase[i, d]
                acc += cmath.exp(1j * total)
            af_db = 10 * math.log10(abs(acc / math.sqrt(n_el)) ** 2)
            worst = max(worst, abs(synth_db[d] - af_db))
    assert worst < 1e-9
    assert time.perf_counter() - start < 5.0


def test_c06_quantization_bound_0_687_db_1000_trials():
    start = time.perf_counter()
    target = 1000
    grid = make_uniform_sphere_grid(target)
    while len(grid) < 1000:
        target += 10
        grid = make_uniform_sphere_grid(target)
    # each direction is one independent 4-element complex response
    pset = random_pattern_set(grid, ("e0", "e1", "e2", "e3"), seed=60, single_pol=True)
    plan = SynthesisPlan((SubArraySpec("s", (0, 1, 2, 3)),), bits=3)
    best = max_gain_over_plan(pset, plan).gain
    continuous = np.abs(pset.gains[:, :, 0]).sum(axis=0) ** 2 / 4.0
    loss_db = 10 * np.log10(best / continuous)
    violations = int(np.count_nonzero(loss_db < -0.687))
    assert len(grid) >= 1000
    assert violations == 0
    assert time.perf_counter() - start < 10.0


def test_c07_deembedding_round_trip_table_values():
    start = time.perf_counter()
    grid = make_regular_grid(10.0, 30.0)
    feeds = tuple(PORT_LOSSES_DB)
    simulated = random_pattern_set(grid, feeds, seed=70)
    factors = np.array(
        [10 ** (-PORT_LOSSES_DB[f] / 20.0) for f in feeds]
    )[:, None, None]
    measured = ElementPatternSet(grid, feeds, simulated.gains * factors)
    windows = {f: BeamWindow(Direction(90.0, 0.0), 60.0) for f in feeds}

    table = estimate_losses(simulated, measured, windows)
    for feed in feeds:
        assert table.loss_db[feed] == pytest.approx(PORT_LOSSES_DB[feed], abs=1e-9)

    restored = apply_losses(measured, table)
    sim_db = 10 * np.log10((np.abs(simulated.gains) ** 2).sum(axis=2))
    res_db = 10 * np.log10((np.abs(restored.gains) ** 2).sum(axis=2))
    in_window = (np.abs(grid.theta_deg - 90.0) <= 60.0) & (
        np.minimum(grid.phi_deg, 360.0 - grid.phi_deg) <= 60.0
    )
    assert np.max(np.abs(res_db[:, in_window] - sim_db[:, in_window])) < 1e-9
    assert time.perf_counter() - start < 1.0


def test_c08_cdf_matches_bruteforce_oracle():
    start = time.perf_counter()
    grids = [make_uniform_sphere_grid(301), make_regular_grid(1.0, 10.0)]
    assert len(grids[1]) == 6446
    worst_cdf = 0.0
    worst_pct = 0.0
    for gi, grid in enumerate(grids):
        weights = grid.weight_sr
        total = float(weights.sum())
        for seed in range(5):
            rng = np.random.default_rng(80 + 10 * gi + seed)
            gain = rng.uniform(0.01, 10.0, size=len(grid))
            result = coverage_cdf(GainMap(grid, gain))
            assert np.all(np.diff(result.cdf) > 0.0)
            assert np.all(np.diff(result.gain_db) > 0.0)

            gain_db = 10 * np.log10(gain)
            probes = np.quantile(gain_db, np.linspace(0.02, 0.98, 20))
            for x in probes:
                expected = float(weights[gain_db < x].sum()) / total
                worst_cdf = max(worst_cdf, abs(result.cdf_at(x) - expected))

            order = np.argsort(gain_db, kind="stable")
            sorted_db = gain_db[order]
            cum = np.cumsum(weights[order]) / total
            for p in (0.1, 0.5, 0.9):
                # first cumulative level reaching p, lerped in dB from the
                # previous distinct gain; distinct values here almost surely
                j = int(np.searchsorted(cum, p, side="left"))
                if j == 0:
                    expected = sorted_db[0]
                else:
                    g_lo, c_lo = sorted_db[j - 1], cum[j - 1]
                    g_hi, c_hi = sorted_db[j], cum[j]
                    expected = g_lo + (p - c_lo) / (c_hi - c_lo) * (g_hi - g_lo)
                worst_pct = max(worst_pct, abs(percentile_gain(result, p) - expected))
    assert worst_cdf < 1e-9
    assert worst_pct < 1e-9
    assert time.perf_counter() - start < 5.0


def test_c09_grid_closure_within_0_1_percent():
    start = time.perf_counter()
    sphere = 4 * math.pi
    for grid in (make_regular_grid(1.0, 10.0), make_uniform_sphere_grid(301)):
        assert abs(grid.weight_sum - sphere) / sphere < 1e-3
    assert time.perf_counter() - start < 1.0


def test_c10_end_to_end_determinism_and_scale(tmp_path):
    grid = make_regular_grid(1.0, 10.0)
    feeds = tuple(f"f{i}" for i in range(8))
    pset = random_pattern_set(grid, feeds, seed=100)
    pattern_path = tmp_path / "elements.csv"
    save_pattern_csv(pset, pattern_path)
    groups = [(0, 1, 2, 3), (4, 5, 6, 7), (0, 2, 4, 6), (1, 3, 5, 7)]
    config = {
        "pattern": str(pattern_path),
        "plan": {
            "bits": 3,
            "sub_arrays": [
                {"label": f"s{i}", "feeds": [feeds[j] for j in g]}
                for i, g in enumerate(groups)
            ],
        },
        "levels": [0.1, 0.5],
        "output_dir": "",
    }

    outputs = ("gain_map.csv", "cdf.csv", "summary.json", "cdf.svg")
    runs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        config["output_dir"] = str(out)
        cfg_path = tmp_path / f"config_{tag}.json"
        write_json(cfg_path, config)
        started = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "arraycov.cli", "coverage", "--config", str(cfg_path)],
            capture_output=True,
            text=True,
        )
        elapsed = time.perf_counter() - started
        assert proc.returncode == 0, proc.stderr
        assert elapsed < 60.0
        runs.append({name: (out / name).read_bytes() for name in outputs})

    summary = json.loads(runs[0]["summary.json"])
    assert summary["realizations"] == 2048
    assert summary["grid_points"] == 6446
    for name in outputs:
        assert runs[0][name] == runs[1][name], f"{name} differs between runs"


def test_c11_mae_constant_offset_and_identity():
    start = time.perf_counter()
    grid = make_regular_grid(5.0, 15.0)
    rng = np.random.default_rng(110)
    base = GainMap(grid, rng.uniform(0.1, 5.0, size=len(grid)))
    for _, value in mae_per_theta_cut(base, base):
        assert value == 0.0
    offset_db = 2.5
    shifted = GainMap(grid, base.gain * 10 ** (offset_db / 10.0))
    cuts = mae_per_theta_cut(base, shifted)
    assert len(cuts) == 37  # one ring per 5 deg step
    for _, value in cuts:
        assert value == pytest.approx(offset_db, abs=1e-9)
    assert time.perf_counter() - start < 1.0
