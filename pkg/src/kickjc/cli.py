"""Command-line front end emitting CSV for external plotting.

Configuration is resolved as: built-in defaults, then an optional ``key = value`` file
(``--config``), then command-line flags. Every CSV begins with a ``#`` comment line
holding the resolved configuration.

Exit codes: 0 success, 2 configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from kickjc import __version__
from kickjc.classical import (
    CONVENTIONS,
    IntegrationAbort,
    default_substeps,
    invariants,
    seeded_initial_state,
    strobe_trajectory,
)
from kickjc.floquet import build_floquet, evolve, floquet_spectrum, resonance_table
from kickjc.jc import SystemParams
from kickjc.sector import QuantumState, build_basis, observable_matrix
from kickjc.sweep import (
    SweepGrid,
    sweep_classical_localization,
    sweep_observables_vs_kick,
    sweep_quantum_participation,
)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMAND_KICKS = {"evolve": 1000, "sweep": 1000, "strobe": 200, "observables": 2000}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    beta: float = 1.0
    delta: float = 0.0
    betaT: float = 1.2
    kappa_tau: float = 0.1
    L: int = 2
    n_kicks: int | None = None
    substeps: int | None = None
    kick_sign: int = -1
    classical_kick: str = "rotation"
    seed: int = 0
    threads: int = 1
    out: str | None = None
    initial_state: str | None = None
    burn_in: int = 100
    kappa_tau_min: float = 0.0
    kappa_tau_max: float = 1.0
    kappa_tau_num: int = 11
    betaT_min: float = 0.1
    betaT_max: float = 7.0
    betaT_num: int = 11
    n_seeds: int = 5
    seed_atoms: str = "ground"
    n_max: int = 3
    resonance_scale: float = 2 * math.pi

    def validate(self) -> None:
        def need(ok: bool, name: str, why: str):
            if not ok:
                raise ConfigError(f"invalid config field '{name}': {why} (got {getattr(self, name)!r})")

        for name in ("beta", "delta", "betaT", "kappa_tau", "kappa_tau_min", "kappa_tau_max",
                     "betaT_min", "betaT_max", "resonance_scale"):
            need(math.isfinite(getattr(self, name)), name, "must be finite")
        need(self.beta > 0, "beta", "must be > 0")
        need(self.betaT > 0, "betaT", "must be > 0")
        need(self.kappa_tau >= 0, "kappa_tau", "must be >= 0")
        need(self.L >= 1, "L", "must be >= 1")
        need(self.n_kicks is None or self.n_kicks >= 1, "n_kicks", "must be >= 1")
        need(self.substeps is None or self.substeps >= 1, "substeps", "must be >= 1")
        need(self.kick_sign in (-1, 1), "kick_sign", "must be +1 or -1")
        need(self.classical_kick in CONVENTIONS, "classical_kick", f"must be one of {CONVENTIONS}")
        need(0 <= self.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
        need(self.threads >= 1, "threads", "must be >= 1")
        need(self.burn_in >= 0, "burn_in", "must be >= 0")
        need(self.kappa_tau_min >= 0, "kappa_tau_min", "must be >= 0")
        need(self.kappa_tau_max >= self.kappa_tau_min, "kappa_tau_max", "must be >= kappa_tau_min")
        need(self.kappa_tau_num >= 1, "kappa_tau_num", "must be >= 1")
        need(self.betaT_min > 0, "betaT_min", "must be > 0")
        need(self.betaT_max >= self.betaT_min, "betaT_max", "must be >= betaT_min")
        need(self.betaT_num >= 1, "betaT_num", "must be >= 1")
        need(self.kappa_tau_num == 1 or self.kappa_tau_max > self.kappa_tau_min, "kappa_tau_max",
             "must exceed kappa_tau_min when kappa_tau_num > 1")
        need(self.betaT_num == 1 or self.betaT_max > self.betaT_min, "betaT_max",
             "must exceed betaT_min when betaT_num > 1")
        need(self.n_seeds >= 1, "n_seeds", "must be >= 1")
        need(self.seed_atoms in ("ground", "random"), "seed_atoms", "must be 'ground' or 'random'")
        need(self.n_max >= 1, "n_max", "must be >= 1")
        need(self.resonance_scale > 0, "resonance_scale", "must be > 0")
        if self.initial_state is not None:
            try:
                build_basis(self.L).index_of(self.initial_state)
            except ValueError as exc:
                raise ConfigError(f"invalid config field 'initial_state': {exc}") from None

    @property
    def params(self) -> SystemParams:
        return SystemParams.from_dimensionless(self.betaT, self.kappa_tau, self.delta / self.beta, self.beta)

    def kicks(self, command: str) -> int:
        return self.n_kicks if self.n_kicks is not None else COMMAND_KICKS[command]

    def kappa_tau_axis(self):
        return np.linspace(self.kappa_tau_min, self.kappa_tau_max, self.kappa_tau_num)

    def betaT_axis(self):
        return np.linspace(self.betaT_min, self.betaT_max, self.betaT_num)


_FIELD_TYPES = {
    f.name: (int if "int" in str(f.type) else float if "float" in str(f.type) else str)
    for f in fields(RunConfig)
}


def _coerce(name: str, text: str):
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config field '{name}'")
    text = text.strip()
    if text.lower() in ("", "none", "auto") and RunConfig.__dataclass_fields__[name].default is None:
        return None
    kind = _FIELD_TYPES[name]
    try:
        if kind is int:
            return int(text, 0)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"invalid config field '{name}': cannot parse {text!r} as {kind.__name__}") from None
    return text


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = _coerce(key.replace("-", "_"), value)
    return out


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def header_line(command: str, cfg: RunConfig) -> str:
    # out and threads never change the numbers, so they stay out of the header
    items = {k: v for k, v in dataclasses.asdict(cfg).items() if k not in ("out", "threads")}
    body = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(items.items()))
    return f"# kickjc {__version__} command={command} {body}"


def _write(cfg: RunConfig, command: str, columns, rows) -> None:
    buf = io.StringIO()
    buf.write(header_line(command, cfg) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    if cfg.out is None or cfg.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())


def cmd_spectrum(cfg: RunConfig) -> None:
    basis = build_basis(cfg.L)
    params = cfg.params
    spec = floquet_spectrum(build_floquet(basis, params, cfg.kick_sign), basis, params)
    rows = zip(range(spec.dim), spec.eigenphases, spec.participation, spec.psi2_weight)
    _write(cfg, "spectrum", ["index", "eigenphase_rad", "participation", "psi2_weight"], rows)


def cmd_evolve(cfg: RunConfig) -> None:
    basis = build_basis(cfg.L)
    psi0 = QuantumState.bare(basis, cfg.initial_state or f"g{cfg.L};g0")
    u_f = build_floquet(basis, cfg.params, cfg.kick_sign)
    ops = {name: observable_matrix(name, basis) for name in ("n1", "exc1", "proj_psi2")}
    ev = evolve(psi0, u_f, cfg.kicks("evolve"), ops)
    rows = zip(ev.kicks, ev.expectations["n1"], ev.expectations["exc1"], ev.expectations["proj_psi2"],
               ev.norm_residual)
    _write(cfg, "evolve", ["kick", "exp_n1", "exp_excitations_cav1", "exp_proj_psi2", "norm_residual"], rows)


def _grid(cfg: RunConfig, n_kicks: int) -> SweepGrid:
    return SweepGrid(
        tuple(cfg.kappa_tau_axis()), tuple(cfg.betaT_axis()), beta=cfg.beta, delta=cfg.delta, L=cfg.L,
        n_kicks=n_kicks, substeps=cfg.substeps, kick_sign=cfg.kick_sign, classical_kick=cfg.classical_kick,
    )


def cmd_sweep(cfg: RunConfig, kind: str) -> None:
    command = f"sweep-{kind}"
    if kind == "quantum":
        result = sweep_quantum_participation(_grid(cfg, cfg.kicks("sweep")), cfg.threads)
        _write(cfg, command, ["kappa_tau", "betaT", "value", "status"], result.rows())
    elif kind == "classical":
        result = sweep_classical_localization(_grid(cfg, cfg.kicks("sweep")), cfg.threads)
        if any(s != "ok" for s in result.status.ravel()) and np.all(np.isnan(result.values)):
            raise IntegrationAbort("every cell of the classical sweep failed")
        _write(cfg, command, ["kappa_tau", "betaT", "value", "status"], result.rows())
    elif kind == "observables":
        table = sweep_observables_vs_kick(
            cfg.kappa_tau_axis(), cfg.params, None if cfg.initial_state is None
            else QuantumState.bare(build_basis(cfg.L), cfg.initial_state),
            n_kicks=cfg.kicks("observables"), burn_in=cfg.burn_in, L=cfg.L, kick_sign=cfg.kick_sign,
            workers=cfg.threads,
        )
        rows = []
        for i, kt in enumerate(table.kappa_tau):
            for name, values in table.averages.items():
                rows.append((kt, table.betaT, f"avg_{name}", values[i], "ok"))
            rows.append((kt, table.betaT, "mean_participation", table.mean_participation[i], "ok"))
            for name, value in table.haar.items():
                rows.append((kt, table.betaT, f"haar_{name}", value, "ok"))
        _write(cfg, command, ["kappa_tau", "betaT", "quantity", "value", "status"], rows)
    else:
        raise ConfigError(f"unknown sweep kind {kind!r}")


def cmd_strobe(cfg: RunConfig) -> None:
    params = cfg.params
    substeps = cfg.substeps or default_substeps(params.betaT)
    rows = []
    for seed_id in range(cfg.n_seeds):
        init = seeded_initial_state([cfg.seed, seed_id], float(cfg.L), cfg.seed_atoms)
        traj = strobe_trajectory(init, params, cfg.kicks("strobe"), substeps, cfg.classical_kick)
        inv = invariants(traj.samples)
        for n, y in enumerate(traj.samples):
            rows.append((
                seed_id, n + 1, y[0].real, y[0].imag, y[1].real, y[1].imag, y[2].real, y[2].imag,
                y[3].real, y[3].imag, y[4].real, y[5].real, inv.N1[n], inv.N2[n], inv.bloch1[n], inv.bloch2[n],
            ))
    columns = ["seed_id", "kick", "re_E1", "im_E1", "re_E2", "im_E2", "re_S1", "im_S1", "re_S2", "im_S2",
               "Sz1", "Sz2", "N1", "N2", "bloch_residual_1", "bloch_residual_2"]
    _write(cfg, "strobe", columns, rows)


def cmd_resonances(cfg: RunConfig) -> None:
    rows = sorted(resonance_table(cfg.n_max, cfg.resonance_scale), key=lambda r: (r[2], r[0]))
    _write(cfg, "resonances", ["family", "n", "predicted_T"], rows)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--out", metavar="PATH", help="CSV output path (default stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--beta", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--betaT", type=float)
    common.add_argument("--kappa-tau", dest="kappa_tau", type=float)
    common.add_argument("--L", dest="L", type=int)
    common.add_argument("--n-kicks", dest="n_kicks", type=int)
    common.add_argument("--substeps", type=int)
    common.add_argument("--kick-sign", dest="kick_sign", type=int, choices=(-1, 1))
    common.add_argument("--classical-kick", dest="classical_kick", choices=CONVENTIONS)
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key (repeatable)")

    parser = argparse.ArgumentParser(prog="kickjc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kickjc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="Floquet eigenphases and participation numbers")
    sub.add_parser("evolve", parents=[common], help="stroboscopic evolution from a bare state")
    sw = sub.add_parser("sweep", parents=[common], help="parameter-grid sweeps")
    sw.add_argument("kind", choices=("quantum", "classical", "observables"))
    sub.add_parser("strobe", parents=[common], help="classical strobe trajectories")
    sub.add_parser("resonances", parents=[common], help="predicted resonant kick periods")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip().replace("-", "_")
        values[key] = _coerce(key, value)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "sweep":
            cmd_sweep(cfg, args.kind)
        else:
            {"spectrum": cmd_spectrum, "evolve": cmd_evolve, "strobe": cmd_strobe,
             "resonances": cmd_resonances}[args.command](cfg)
    except ConfigError as exc:
        print(f"kickjc: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationAbort as exc:
        print(f"kickjc: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
