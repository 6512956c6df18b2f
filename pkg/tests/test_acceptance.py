"""End-to-end acceptance checks, one test per criterion."""

import json
import math
import time

import mpmath as mp
import numpy as np
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from gamowlab import (
    EffectiveModel,
    GamowState,
    RotatedContour,
    SearchRegion,
    SemigroupDomainError,
    anti_hardy_example,
    bw_survival,
    count_zeros,
    decompose,
    direct_survival,
    eigenvalue_pairing_residual,
    evolve_effective,
    hardy_suite,
    intensity,
    jost_function,
    radial_ode_oracle,
    scan_poles,
    sector_poles,
    semigroup_phase,
)
from gamowlab.cli import main
from gamowlab.config import ExperimentConfig, default_config
from gamowlab.runner import run

G5 = GamowState.from_energy(5.0, 1.0)


def e1_physical_amplitude(E_R, Gamma, t):
    """Half-line Lorentzian transform via exponential integrals (30 digits)."""
    mp.mp.dps = 30
    b = mp.mpf(Gamma) / 2

    def half_line(w):
        v = mp.exp(-1j * w * t) * mp.e1(-1j * w * t)
        if mp.im(w) < 0:
            v -= 2j * mp.pi * mp.exp(-1j * w * t)
        return v

    return complex((Gamma / (2 * mp.pi)) * (half_line(mp.mpc(E_R, b)) - half_line(mp.mpc(E_R, -b))) / (2j * b))


def quadrature_physical_amplitude(E_R, Gamma, t):
    """Direct 30-digit oscillatory quadrature of the truncated Lorentzian."""
    mp.mp.dps = 30
    f = lambda E: (Gamma / (2 * mp.pi)) / ((E - E_R) ** 2 + (mp.mpf(Gamma) / 2) ** 2) * mp.exp(-1j * E * t)
    head = mp.quad(f, [0, E_R - 5 * Gamma, E_R, E_R + 5 * Gamma])
    tail = mp.quadosc(f, [E_R + 5 * Gamma, mp.inf], omega=t)
    return complex(head + tail)


def test_criterion_1_exact_exponential(acceptance):
    start = time.perf_counter()
    ts = np.linspace(0.0, 10.0, 50)
    dev = max(abs(abs(bw_survival(G5, float(t), "extended")) ** 2 - math.exp(-G5.Gamma * t)) for t in ts)
    neg = max(abs(bw_survival(G5, float(t), diagnostic=True)) for t in np.linspace(-10.0, -0.2, 50))
    elapsed = time.perf_counter() - start
    acceptance(
        1,
        dev < 1e-6 and neg < 1e-6 and elapsed < 10,
        f"max ||a|^2 - e^-Gt| = {dev:.2e}, max |a(t<0)| = {neg:.2e}, {elapsed:.1f} s",
    )


def test_criterion_2_truncated_spectrum(acceptance):
    start = time.perf_counter()
    cfg = default_config().to_dict()
    cfg["resonance"] = {"E_R": 5.0, "Gamma": 1.0}
    cfg["time_grid"] = {"t_min": 0.0, "t_max": 40.0, "n_points": 81}
    table = run("bw-compare", ExperimentConfig.from_dict(cfg))
    t, rel = table.column("t"), table.column("relative_deviation")
    # t* is where the deviation crosses 10% for good
    inside = np.nonzero(np.abs(rel) <= 0.1)[0]
    last = int(inside[-1]) if inside.size else -1
    stays = last < len(t) - 1
    t_star = float(t[last + 1]) if stays else math.inf

    ts = np.geomspace(400.0, 4000.0, 6)
    p = np.array([abs(bw_survival(G5, float(x), "physical")) ** 2 for x in ts])
    slope = float(np.polyfit(np.log(ts), np.log(p), 1)[0])

    oracle_err = max(
        abs(bw_survival(G5, x, "physical") - e1_physical_amplitude(5.0, 1.0, x)) for x in (0.5, 3.0, 12.0, 400.0, 4000.0)
    )
    quad_err = abs(bw_survival(G5, 3.0, "physical") - quadrature_physical_amplitude(5.0, 1.0, 3.0))
    elapsed = time.perf_counter() - start
    ok = stays and abs(slope + 2) <= 0.3 and oracle_err < 1e-10 and quad_err < 1e-10 and elapsed < 60
    acceptance(
        2,
        ok,
        f"deviation > 10% for t >= {t_star:.1f}, tail slope {slope:.4f}, "
        f"closed-form err {oracle_err:.1e}, quadrature err {quad_err:.1e}, {elapsed:.1f} s",
    )


def test_criterion_3_pole_completeness(acceptance, model10):
    start = time.perf_counter()
    region = SearchRegion(0.5, 10.0, -2.0, 0.0)
    found = scan_poles(model10, region)
    expected = count_zeros(model10, region)
    residual = max(abs(jost_function(model10, p.k_pole)) for p in found)
    partner = max(abs(jost_function(model10, -p.k_pole.conjugate())) for p in found)
    re, im = np.meshgrid(np.linspace(0.3, 10.0, 10), np.linspace(-2.0, 1.0, 10))
    k = (re + 1j * im).ravel()
    ode = float(np.max(np.abs(radial_ode_oracle(model10, k) - jost_function(model10, k))))
    elapsed = time.perf_counter() - start
    ok = len(found) == expected and residual < 1e-12 and partner < 1e-12 and ode < 1e-6 and elapsed < 30
    acceptance(
        3,
        ok,
        f"{len(found)} poles found, {expected} counted, max |F| {residual:.1e}, "
        f"partner max |F| {partner:.1e}, ODE diff {ode:.1e} on {k.size} points, {elapsed:.1f} s",
    )


def test_criterion_4_reconstruction(acceptance, state10, contour45, poles45):
    start = time.perf_counter()
    c30 = RotatedContour(theta=math.pi / 6)
    p30 = sector_poles(state10.model, c30)
    g_min = min(p.Gamma for p in poles45)
    worst_rel, worst_gap = 0.0, 0.0
    for t in np.linspace(0.0, 5.0 / g_min, 20):
        a = decompose(state10, poles45, contour45, float(t))
        b = decompose(state10, p30, c30, float(t), direct=a.direct)
        worst_rel = max(worst_rel, a.residual / abs(a.direct), b.residual / abs(b.direct))
        worst_gap = max(worst_gap, abs(a.reconstructed - b.reconstructed))
    elapsed = time.perf_counter() - start
    acceptance(
        4,
        worst_rel < 1e-6 and worst_gap < 1e-8 and elapsed < 120,
        f"max relative residual {worst_rel:.1e}, angle gap {worst_gap:.1e} (pi/4 vs pi/6), {elapsed:.1f} s",
    )


def test_criterion_5_effective_window(acceptance, state10, poles45):
    start = time.perf_counter()
    narrow = min(poles45, key=lambda p: p.Gamma)
    m = EffectiveModel.from_poles(state10, poles45)
    ts = np.linspace(1.0 / narrow.Gamma, 5.0 / narrow.Gamma, 25)
    full = np.array([abs(direct_survival(state10, float(t))) ** 2 for t in ts])
    approx = np.abs(np.sum(evolve_effective(m, ts), axis=1)) ** 2
    rel = float(np.max(np.abs(approx - full) / full))
    fitted = -float(np.polyfit(ts, np.log(full), 1)[0])
    gamma_err = abs(fitted - narrow.Gamma) / narrow.Gamma
    elapsed = time.perf_counter() - start
    acceptance(
        5,
        rel < 0.01 and gamma_err < 0.02 and elapsed < 60,
        f"pole-only max rel err {rel:.1e} over {len(poles45)} poles, fitted Gamma {fitted:.5f} "
        f"vs {narrow.Gamma:.5f} ({100 * gamma_err:.2f}%), {elapsed:.1f} s",
    )


def test_criterion_6_weak_eigenvalue(acceptance):
    start = time.perf_counter()
    suite = hardy_suite()
    worst = max(eigenvalue_pairing_residual(G5, psi) for psi in suite)
    anti = eigenvalue_pairing_residual(G5, anti_hardy_example())

    # closed form for the counterexample: poles at +-i, residues at z and +i
    z = G5.z
    B = 2j * math.pi * (1 / ((1j - -1j) * (1j - z)))
    A = 2j * math.pi * (1j / ((1j - -1j) * (1j - z)))
    exact = abs(A - z * B) / abs(z * B)
    elapsed = time.perf_counter() - start
    ok = len(suite) >= 10 and worst < 1e-8 and 0.1 < anti < 10 and abs(anti - exact) < 1e-8 * exact and elapsed < 10
    acceptance(
        6,
        ok,
        f"{len(suite)} Hardy functions max residual {worst:.1e}, anti-Hardy {anti:.4f} "
        f"(residue calculus {exact:.4f}), {elapsed:.1f} s",
    )


_semigroup = {"cases": 0, "raised": 0, "worst": 0.0}


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["decaying", "growing"]), st.floats(-40.0, 40.0))
def _domain_property(kind, t):
    g = GamowState(G5.pole, kind)
    admissible = t >= 0 if kind == "decaying" else t <= 0
    _semigroup["cases"] += 1
    try:
        v = semigroup_phase(g, t)
    except SemigroupDomainError:
        _semigroup["raised"] += 1
        assert not admissible
        return
    assert admissible and np.isfinite(v)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def _composition_property(t1, t2):
    lhs = semigroup_phase(G5, t1 + t2)
    rhs = semigroup_phase(G5, t1) * semigroup_phase(G5, t2)
    err = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    _semigroup["worst"] = max(_semigroup["worst"], err)
    assert err <= 1e-12


def test_criterion_7_semigroup(acceptance):
    _domain_property()
    _composition_property()
    acceptance(
        7,
        _semigroup["raised"] > 0 and _semigroup["worst"] <= 1e-12,
        f"{_semigroup['cases']} (kind, t) cases, {_semigroup['raised']} rejected, "
        f"composition max rel err {_semigroup['worst']:.1e} on 100+ pairs",
    )


def test_criterion_8_two_level_interference(acceptance, state10, contour45, poles45):
    two = EffectiveModel.from_poles(state10, poles45[:2])
    beats = EffectiveModel(two.energies, (1.0, 1.0))
    period = 2 * math.pi / abs(two.energies[0].real - two.energies[1].real)
    t = np.linspace(0.0, 3 * period, 60001)
    y = intensity(beats, t)
    minima = t[1:-1][(y[1:-1] < y[:-2]) & (y[1:-1] < y[2:])]
    measured = float(np.mean(np.diff(minima)))
    period_err = abs(measured - period) / period

    m = EffectiveModel.from_poles(state10, poles45)
    worst = 0.0
    for ti in (0.0, 0.7, 2.5, 6.0):
        d = decompose(state10, poles45, contour45, ti)
        worst = max(worst, float(np.max(np.abs(np.array([p.value for p in d.pole_terms]) - evolve_effective(m, ti)))))
    acceptance(
        8,
        period_err < 0.01 and worst < 1e-10,
        f"beat period {measured:.5f} vs {period:.5f} ({100 * period_err:.3f}%), "
        f"pole-term mismatch {worst:.1e}",
    )


def test_criterion_9_determinism_and_diagnostics(acceptance, tmp_path, capsys):
    raw = default_config().to_dict()
    raw["time_grid"].update(t_min=0.0, t_max=3.0, n_points=4)
    raw["energy_grid"].update(e_min=0.0, e_max=16.0, n_points=9)
    good = tmp_path / "good.yaml"
    good.write_text(yaml.safe_dump(raw, sort_keys=False))

    identical = []
    for command in ("poles", "lineshape", "survival", "decompose", "bw-compare", "effective"):
        outputs = []
        for fmt in ("csv", "json", "csv"):
            code = main([command, "--config", str(good), "--format", fmt])
            outputs.append((code, capsys.readouterr().out))
        identical.append(outputs[0] == outputs[2] and outputs[0][0] == 0 and outputs[1][0] == 0)

    broken = {
        "contour.theta": ("contour", "theta", 0.0),
        "tolerances.pole_tol": ("tolerances", "pole_tol", -1e-12),
        "time_grid.t_min": ("time_grid", "t_min", -1.0),
        "state.poles[0]": ("state", "poles", [[8.0, -8.0]]),
        "model.a": ("model", "a", "one"),
    }
    precise = []
    for field, (section, key, value) in broken.items():
        bad = default_config().to_dict()
        bad[section][key] = value
        path = tmp_path / "bad.yaml"
        path.write_text(yaml.safe_dump(bad, sort_keys=False))
        code = main(["survival", "--config", str(path)])
        err = capsys.readouterr().err.strip().splitlines()
        rec = json.loads(err[0]) if len(err) == 1 else {}
        precise.append(code == 1 and [v["field"] for v in rec.get("violations", [])] == [field])
    acceptance(
        9,
        all(identical) and all(precise),
        f"{sum(identical)}/6 subcommands byte-identical, {sum(precise)}/{len(precise)} malformed configs "
        f"rejected naming exactly the bad field",
    )
