"""Exit criteria. Run ``pytest tests/test_acceptance.py`` for the per-criterion PASS/FAIL report."""

import math
import time

import numpy as np
import pytest

from kickjc.classical import (
    average_N2,
    canonical_initial_state,
    invariants,
    seeded_initial_state,
    strobe_trajectory,
)
from kickjc.cli import main
from kickjc.floquet import (
    build_floquet,
    evolve,
    floquet_spectrum,
    random_state_mean,
    resonance_times,
    tunneling_analysis,
)
from kickjc.jc import SystemParams
from kickjc.operators import hermitian_eig, unitarity_error
from kickjc.sector import QuantumState, build_basis, build_H0, observable_matrix, swap_matrix
from kickjc.sweep import SweepGrid, sweep_quantum_participation
from oracles import brute_force_operators, find_peak_near, first_transfer_kick, square_pulse_propagator

B2 = build_basis(2)
acceptance = pytest.mark.acceptance


def point(betaT, kappa_tau):
    return SystemParams.from_dimensionless(betaT, kappa_tau)


@acceptance
@pytest.mark.criterion("1 unitarity & swap symmetry (10x10 grid)")
def test_criterion_1_unitarity_and_symmetry(criterion):
    t0 = time.perf_counter()
    swap = swap_matrix(B2)
    worst_u = worst_s = 0.0
    for kt in np.linspace(0.0, 2.0, 10):
        for bt in np.linspace(0.1, 7.0, 10):
            u = build_floquet(B2, point(bt, kt))
            worst_u = max(worst_u, unitarity_error(u))
            worst_s = max(worst_s, np.abs(u @ swap - swap @ u).max())
    elapsed = time.perf_counter() - t0
    criterion.append(f"max|U^dag U - I|={worst_u:.1e} max|[U,SWAP]|={worst_s:.1e} t={elapsed:.2f}s")
    assert worst_u < 1e-12
    assert worst_s < 1e-12
    assert elapsed < 5


@acceptance
@pytest.mark.criterion("2 kick-off limit")
def test_criterion_2_kick_off_limit(criterion):
    p = point(1.2, 0.0)
    spec = floquet_spectrum(build_floquet(B2, p), B2, p)
    energies = hermitian_eig(build_H0(B2, p)).eigenvalues
    np.testing.assert_allclose(energies, sorted([-2, -math.sqrt(2), -math.sqrt(2), 0, 0,
                                                 math.sqrt(2), math.sqrt(2), 2]), atol=1e-12)
    p_err = np.abs(spec.participation - 1 / 8).max()
    expected = np.sort(np.angle(np.exp(-1j * energies * p.period_T)))
    phase_err = np.abs(np.angle(np.exp(1j * (spec.eigenphases - expected)))).max()
    # group exactly degenerate eigenphases
    groups = [1]
    for a, b in zip(spec.eigenphases, spec.eigenphases[1:]):
        if b - a < 1e-9:
            groups[-1] += 1
        else:
            groups.append(1)
    pair_phases = [spec.eigenphases[i] for i in range(7) if spec.eigenphases[i + 1] - spec.eigenphases[i] < 1e-9]
    pair_energies = sorted(np.angle(np.exp(-1j * np.array([math.sqrt(2), -math.sqrt(2), 0.0]) * p.period_T)))
    criterion.append(f"max|P-1/8|={p_err:.1e} phase err={phase_err:.1e} multiplicities={sorted(groups)}")
    assert p_err < 1e-12
    assert phase_err < 1e-10
    assert sorted(groups) == [1, 1, 2, 2, 2]
    np.testing.assert_allclose(sorted(pair_phases), pair_energies, atol=1e-10)


@acceptance
@pytest.mark.criterion("3 delta-kick oracle")
def test_criterion_3_delta_kick_oracle(criterion):
    t0 = time.perf_counter()
    p = point(1.2, 0.3)
    h0, k, _ = brute_force_operators(B2.states, p.beta, p.delta)
    u_f = build_floquet(B2, p)
    errors = []
    for tau in (1e-3, 5e-4):
        u_pulse = square_pulse_propagator(h0, k, p.period_T, p.kappa_tau, tau, pulse_steps=2000, free_steps=10_000)
        errors.append(np.abs(u_pulse - u_f).max())
    elapsed = time.perf_counter() - t0
    criterion.append(f"err(tau=1e-3)={errors[0]:.2e} err(tau=5e-4)={errors[1]:.2e} t={elapsed:.2f}s")
    assert errors[0] < 1e-3
    assert errors[1] < errors[0]
    assert elapsed < 10


def tunneling(kappa_tau, n_kicks=2000):
    p = point(1.2, kappa_tau)
    u_f = build_floquet(B2, p)
    ops = {name: observable_matrix(name, B2) for name in ("exc1", "proj_psi2")}
    ev = evolve(QuantumState.bare(B2, "g2;g0"), u_f, n_kicks, ops)
    report = tunneling_analysis(floquet_spectrum(u_f, B2, p))
    return ev, report


@acceptance
@pytest.mark.criterion("4 dynamic tunneling")
def test_criterion_4_tunneling(criterion):
    t0 = time.perf_counter()
    slow, rep_slow = tunneling(0.1)
    elapsed = time.perf_counter() - t0
    fast, rep_fast = tunneling(0.2)
    haar = random_state_mean(observable_matrix("proj_psi2", B2))
    t_slow = first_transfer_kick(slow.expectations["exc1"], 0.25)
    t_fast = first_transfer_kick(fast.expectations["exc1"], 0.25)
    rel = abs(t_slow - rep_slow.predicted_period_kicks) / rep_slow.predicted_period_kicks
    w_slow, w_fast = slow.long_time_average("proj_psi2"), fast.long_time_average("proj_psi2")
    criterion.append(
        f"pi/phi={rep_slow.predicted_period_kicks:.1f} first transfer={t_slow} (rel {rel:.3f}); "
        f"<proj>={w_slow:.3f} vs haar {haar}; kt=0.2: pi/phi={rep_fast.predicted_period_kicks:.1f} "
        f"transfer={t_fast} <proj>={w_fast:.3f}; t={elapsed:.2f}s"
    )
    assert slow.expectations["exc1"].max() > 1.9 and slow.expectations["exc1"].min() < 0.1
    assert rel < 0.10
    assert w_slow - haar >= 0.2
    assert rep_fast.predicted_period_kicks < rep_slow.predicted_period_kicks and t_fast < t_slow
    assert w_fast < w_slow
    assert elapsed < 5


@acceptance
@pytest.mark.criterion("5 resonance delocalization")
def test_criterion_5_resonances(criterion):
    bts = np.round(np.arange(1.0, 5.0 + 1e-9, 0.005), 6)
    mean_p = sweep_quantum_participation(SweepGrid((0.05,), tuple(bts))).values[0]
    predicted = [t for t in resonance_times(3) if bts[0] < t < bts[-1]]
    peaks = [find_peak_near(bts, mean_p, t, rel=0.05) for t in predicted]
    far = np.ones(bts.size, dtype=bool)
    for t in predicted:
        far &= np.abs(bts - t) > 0.05 * t
    valley_max = float(mean_p[far].max())
    criterion.append(
        "predicted=" + ", ".join(f"{t:.3f}" for t in predicted)
        + " peaks=" + ", ".join("none" if x is None else f"{x:.3f}" for x in peaks)
        + f" max P between resonances={valley_max:.3f}"
    )
    assert peaks[0] is not None and peaks[1] is not None
    assert valley_max < 0.25


@acceptance
@pytest.mark.criterion("6 ergodic asymptote")
def test_criterion_6_ergodic(criterion):
    t0 = time.perf_counter()
    names = ("n1", "sz1_pop", "szsz")
    ops = {name: observable_matrix(name, B2) for name in names}
    haar = {name: random_state_mean(op) for name, op in ops.items()}
    psi0 = QuantumState.bare(B2, "g2;g0")

    def averages(kt):
        ev = evolve(psi0, build_floquet(B2, point(1.2, kt)), 2000, ops)
        return {name: ev.long_time_average(name, burn_in=100) for name in names}

    hot, cold = averages(2.0), averages(0.02)
    elapsed = time.perf_counter() - t0
    # relative tolerance; the traceless szsz (Haar mean 0) is judged on the operator's unit scale
    scale = {name: max(abs(haar[name]), 1.0) if haar[name] == 0 else abs(haar[name]) for name in names}
    dev_hot = {name: abs(hot[name] - haar[name]) / scale[name] for name in names}
    dev_cold = {name: abs(cold[name] - haar[name]) / scale[name] for name in names}
    criterion.append(
        "kt=2: " + " ".join(f"{n}={hot[n]:.3f}(haar {haar[n]:.3f})" for n in names)
        + "; kt=0.02 max dev=" + f"{max(dev_cold.values()):.2f}" + f"; t={elapsed:.2f}s"
    )
    assert haar["n1"] == pytest.approx(0.625)
    assert all(dev < 0.15 for dev in dev_hot.values())
    assert max(dev_cold.values()) > 0.30
    assert elapsed < 10


@acceptance
@pytest.mark.criterion("7 classical conservation")
def test_criterion_7_classical_conservation(criterion):
    p = point(1.7, 0.4)
    worst_n = worst_b = 0.0
    for seed in range(10):
        init = seeded_initial_state(seed, atoms="random")
        n0 = invariants(init).N_total[0]
        inv = strobe_trajectory(init, p, 1000).invariants()
        worst_n = max(worst_n, np.abs(inv.N_total - n0).max())
        worst_b = max(worst_b, inv.bloch1.max(), inv.bloch2.max())
    init = seeded_initial_state(0, atoms="random")
    n0 = invariants(init).N_total[0]
    drift = [np.abs(strobe_trajectory(init, p, 100, sub).invariants().N_total - n0).max() for sub in (100, 200)]
    ratio = drift[0] / drift[1]
    criterion.append(f"max N drift={worst_n:.1e} max Bloch residual={worst_b:.1e} halving ratio={ratio:.1f}")
    assert worst_n < 1e-8
    assert worst_b < 1e-8
    assert ratio >= 12


@acceptance
@pytest.mark.criterion("8 classical localization contrast")
def test_criterion_8_classical_contrast(criterion):
    init = canonical_initial_state()
    localized = average_N2(init, point(1.0, 0.05), 1000)
    resonant = average_N2(init, point(2 * math.pi, 0.05), 1000)
    criterion.append(f"<N2>(betaT=1)={localized:.4f} <N2>(betaT=2pi)={resonant:.4f} contrast={localized - resonant:.4f}")
    assert localized - resonant >= 0.3


@acceptance
@pytest.mark.criterion("9 strobe rings")
def test_criterion_9_rings(criterion):
    p = point(0.1, 1.3)
    cvs = []
    for seed in range(5):
        f = strobe_trajectory(seeded_initial_state(seed), p, 200).field_energy
        cvs.append(f.std() / f.mean())
    criterion.append("CV=" + ", ".join(f"{c:.4f}" for c in cvs))
    assert max(cvs) < 0.05


COMMANDS = {
    "spectrum": ["spectrum", "--betaT", "1.2", "--kappa-tau", "0.1"],
    "evolve": ["evolve", "--betaT", "1.2", "--kappa-tau", "0.1", "--n-kicks", "300"],
    "sweep-quantum": ["sweep", "quantum", "--set", "kappa_tau_num=3", "--set", "betaT_num=3"],
    "sweep-classical": ["sweep", "classical", "--set", "kappa_tau_num=2", "--set", "betaT_num=2", "--n-kicks", "100"],
    "sweep-observables": ["sweep", "observables", "--set", "kappa_tau_num=3", "--n-kicks", "300"],
    "strobe": ["strobe", "--n-kicks", "50", "--seed", "42"],
    "resonances": ["resonances"],
}


@acceptance
@pytest.mark.criterion("10 determinism")
def test_criterion_10_determinism(criterion, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("beta = 1.0\ndelta = 0.0\nseed = 7\n")
    identical = []
    for name, argv in COMMANDS.items():
        outputs = []
        for run, threads in enumerate(("1", "1" if "sweep" not in name else "3")):
            out = tmp_path / f"{name}-{run}.csv"
            assert main([*argv, "--config", str(cfg), "--threads", threads, "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        identical.append(outputs[0] == outputs[1])
    criterion.append(f"{sum(identical)}/{len(identical)} commands byte-identical")
    assert all(identical)
