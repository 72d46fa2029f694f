"""Command-line front end: sweep orchestration and report emission.

Config precedence: explicit CLI flags > JSON config file (--config) >
built-in defaults.  STA_SEED overrides the default seed only.  Exit codes:
0 ok, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import ce_gates, cost, dynamics, grover, optimizer, qcore, reports


class ConfigError(Exception):
    pass


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def _pick(flag, cfg: dict, key: str, default):
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


def _pick_seed(flag, cfg: dict) -> int:
    if flag is not None:
        return int(flag)
    if "seed" in cfg:
        return int(cfg["seed"])
    return int(os.environ.get("STA_SEED", "0"))


def _report(args, payload: dict, paper_ref: str, config: dict) -> None:
    reports.write_json(getattr(args, "out", None), {
        "command": args.command,
        "paper_ref": paper_ref,
        "config": config,
        **payload,
    })


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gate_cost(args, cfg) -> int:
    n = int(_pick(args.n, cfg, "n", 0))
    theta0 = float(_pick(args.theta0, cfg, "theta0", np.pi))
    omega_tau = float(_pick(args.omega_tau, cfg, "omega_tau", 1.0))
    norm = _pick(args.norm, cfg, "norm", "frobenius")
    sigma = cost.cost_ce_closed_form(omega_tau, theta0, n, norm_kind=norm)
    _report(args, {"sigma": sigma, "norm_kind": norm},
            "controlled-gate superadiabatic cost (closed form)",
            {"n": n, "theta0": theta0, "omega_tau": omega_tau, "norm": norm})
    return 0


def cmd_theta_opt(args, cfg) -> int:
    omega_tau = float(_pick(args.omega_tau, cfg, "omega_tau", 1.0))
    res = optimizer.theta_min(omega_tau)
    _report(args, {
        "theta_min": res.theta_min,
        "avg_cost_at_min": res.avg_cost_at_min,
        "sigma_rel": res.sigma_rel,
        "eta_at_min": res.eta_at_min,
    }, "critical angle of the probabilistic gate protocol",
        {"omega_tau": omega_tau})
    return 0


def cmd_fig1(args, cfg) -> int:
    lo = float(_pick(args.min, cfg, "min", 1e-4))
    hi = float(_pick(args.max, cfg, "max", 1e3))
    points = int(_pick(args.points, cfg, "points", 25))
    if not (1e-4 <= lo < hi <= 1e3):
        raise ConfigError("fig1 grid must satisfy 1e-4 <= min < max <= 1e3")
    if points < 2:
        raise ConfigError("fig1 needs at least 2 grid points")
    grid = np.logspace(np.log10(lo), np.log10(hi), points)
    rows = []
    for i, wt in enumerate(grid):
        res = optimizer.theta_min(float(wt))
        rows.append((float(wt), res.theta_min, res.sigma_rel, res.avg_cost_at_min))
        if (i + 1) % 10 == 0:
            _progress(f"fig1: {i + 1}/{points} grid points")
    reports.write_csv(args.out_csv, ["omega_tau", "theta_min", "sigma_rel",
                                     "avg_cost_at_min"], rows)
    if args.out_svg:
        reports.save_theta_opt_figure(
            args.out_svg, [r[0] for r in rows], [r[1] for r in rows],
            [r[2] for r in rows])
    return 0


def cmd_grover_spectrum(args, cfg) -> int:
    N = int(_pick(args.size, cfg, "size", 8))
    m = int(_pick(args.marked, cfg, "marked", 0))
    schedule = _pick(args.schedule, cfg, "schedule", "linear")
    samples = int(_pick(args.samples, cfg, "samples", 21))
    problem = grover.GroverProblem(N=N, m=m, schedule=schedule)
    rows = []
    for s in np.linspace(0.0, 1.0, samples):
        sp = grover.spectrum_closed_form(problem, float(s))
        rows.append((float(s), sp.E_minus, sp.E_plus, sp.E_deg,
                     sp.b_minus, sp.b_plus, sp.mu_minus, sp.mu_plus))
    reports.write_csv(args.out, ["s", "E_minus", "E_plus", "E_deg",
                                 "b_minus", "b_plus", "mu_minus", "mu_plus"], rows)
    return 0


def cmd_grover_cost(args, cfg) -> int:
    N = int(_pick(args.size, cfg, "size", 8))
    m = int(_pick(args.marked, cfg, "marked", 0))
    schedule = _pick(args.schedule, cfg, "schedule", "linear")
    norm = _pick(args.norm, cfg, "norm", "frobenius")
    tau = float(_pick(args.tau, cfg, "tau", 1.0))
    problem = grover.GroverProblem(N=N, m=m, schedule=schedule, tau=tau)
    if args.superadiabatic:
        rep = cost.grover_superadiabatic_cost(problem, norm)
        ref = "superadiabatic search energetic cost"
    else:
        rep = cost.grover_adiabatic_cost(problem, norm)
        ref = "adiabatic search energetic cost"
    _report(args, {
        "sigma": rep.sigma, "norm_kind": rep.norm_kind, "method": rep.method,
        "samples": rep.samples, "tau": rep.tau,
    }, ref, {"size": N, "marked": m, "schedule": schedule, "norm": norm,
             "tau": tau, "superadiabatic": bool(args.superadiabatic)})
    return 0


def cmd_evolve(args, cfg) -> int:
    model = _pick(args.model, cfg, "model", "ce")
    tau = float(_pick(args.tau, cfg, "tau", 1.0))
    steps = args.steps if args.steps is not None else cfg.get("steps")
    seed = _pick_seed(args.seed, cfg)
    use_cd = not args.no_cd

    if model == "ce":
        n = int(_pick(args.n, cfg, "n", 0))
        phi = float(_pick(args.phi, cfg, "phi", np.pi))
        theta0 = float(_pick(args.theta0, cfg, "theta0", np.pi))
        spec = ce_gates.GateSpec(n=n, phi=phi, theta0=theta0, omega=1.0, tau=tau)
        # deterministic default input: uniform superposition of the register
        psi_n = np.full(spec.target_dim, 1.0 / np.sqrt(spec.target_dim), dtype=complex)
        builder = (ce_gates.build_superadiabatic_ce if use_cd
                   else ce_gates.build_ce_hamiltonian)
        h_of_s = lambda s: builder(s, spec)
        nsteps = int(steps) if steps else dynamics.default_steps(h_of_s, tau)
        result = dynamics.ground_fidelity_trace(
            h_of_s, ce_gates.initial_state(psi_n), tau, nsteps,
            lambda s: ce_gates.ground_space(s, spec))
        target = ce_gates.expected_final_state(psi_n, spec)
        final_fid = float(np.abs(np.vdot(target, result.final_state)) ** 2)
        rng = np.random.Generator(np.random.Philox(seed))
        outcome, _, p_success = ce_gates.measure_ancilla(result.final_state, rng)
        payload = {
            "final_fidelity": final_fid,
            "min_ground_fidelity": min(v for _, v in result.fidelity_trace),
            "success_probability": p_success,
            "measured_outcome": outcome,
            "steps": result.steps,
            "norm_drift": result.norm_drift,
        }
        config = {"model": model, "n": n, "phi": phi, "theta0": theta0,
                  "tau": tau, "counter_diabatic": use_cd, "seed": seed}
    elif model == "grover":
        N = int(_pick(args.size, cfg, "size", 8))
        m = int(_pick(args.marked, cfg, "marked", 0))
        schedule = _pick(args.schedule, cfg, "schedule", "linear")
        problem = grover.GroverProblem(N=N, m=m, schedule=schedule, tau=tau)
        builder = grover.build_grover_sa if use_cd else grover.build_grover_h
        h_of_s = lambda s: builder(problem, s)
        nsteps = int(steps) if steps else dynamics.default_steps(h_of_s, tau)
        result = dynamics.ground_fidelity_trace(
            h_of_s, grover.plus_state(N), tau, nsteps,
            lambda s: grover.eigvec_closed_form(problem, s, -1))
        payload = {
            "final_fidelity": float(np.abs(result.final_state[m]) ** 2),
            "min_ground_fidelity": min(v for _, v in result.fidelity_trace),
            "steps": result.steps,
            "norm_drift": result.norm_drift,
        }
        config = {"model": model, "size": N, "marked": m, "schedule": schedule,
                  "tau": tau, "counter_diabatic": use_cd, "seed": seed}
    else:
        raise ConfigError(f"unknown evolve model {model!r}")

    if args.trace_csv:
        reports.write_csv(args.trace_csv, ["s", "ground_fidelity"],
                          list(result.fidelity_trace))
    _report(args, payload, "driven evolution with instantaneous ground tracking",
            config)
    return 0


def cmd_time_to_solution(args, cfg) -> int:
    model = _pick(args.model, cfg, "model", "local_adiabatic")
    N = int(_pick(args.size, cfg, "size", 16))
    target = float(_pick(args.target, cfg, "target", 0.9))
    tau_star = cost.time_to_solution(model, N, fidelity_target=target)
    _report(args, {"tau_star": tau_star, "fidelity_target": target},
            "search time to solution",
            {"model": model, "size": N, "target": target})
    return 0


def cmd_table1(args, cfg) -> int:
    n_max = int(_pick(args.n_max, cfg, "n_max", 1024))
    tau = float(_pick(args.tau, cfg, "tau", 1.0))
    if n_max < 2 ** 7:
        raise ConfigError("table1 needs --n-max >= 128")
    Ns = [2 ** k for k in range(4, int(np.log2(n_max)) + 1)]
    rows = []
    fits = []
    for model in cost.SWEEP_MODELS:
        _progress(f"table1: sweeping {model}")
        fit_f = cost.scaling_sweep(model, "frobenius", Ns, tau=tau)
        fit_s = cost.scaling_sweep(model, "spectral", Ns, tau=tau)
        fits.extend([fit_f, fit_s])
        rows.append((model, fit_f.slope, fit_f.r2, fit_s.slope, fit_s.r2))
    reports.write_csv(args.out, ["model", "slope_frobenius", "r2_frobenius",
                                 "slope_spectral", "r2_spectral"], rows)
    if args.out_svg:
        reports.save_scaling_figure(args.out_svg, fits)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage text on stderr, exit code 1
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> _Parser:
    p = _Parser(prog="stalab", description=__doc__)
    p.add_argument("--config", help="JSON config file (flags take precedence)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        # accept --config on either side of the subcommand; SUPPRESS keeps the
        # subparser from clobbering a value parsed by the main parser
        sp.add_argument("--config", default=argparse.SUPPRESS)
        return sp

    sp = add("gate-cost", cmd_gate_cost, help="closed-form driven-gate cost")
    sp.add_argument("--n", type=int)
    sp.add_argument("--theta0", type=float)
    sp.add_argument("--omega-tau", dest="omega_tau", type=float)
    sp.add_argument("--norm", choices=["frobenius", "spectral"])
    sp.add_argument("--out")

    sp = add("theta-opt", cmd_theta_opt, help="optimal probabilistic angle")
    sp.add_argument("--omega-tau", dest="omega_tau", type=float)
    sp.add_argument("--out")

    sp = add("fig1", cmd_fig1, help="optimal-angle sweep over omega*tau")
    sp.add_argument("--min", type=float)
    sp.add_argument("--max", type=float)
    sp.add_argument("--points", type=int)
    sp.add_argument("--out-csv", dest="out_csv", required=True)
    sp.add_argument("--out-svg", dest="out_svg")

    sp = add("grover-spectrum", cmd_grover_spectrum, help="closed-form search spectrum")
    sp.add_argument("--size", type=int)
    sp.add_argument("--marked", type=int)
    sp.add_argument("--schedule", choices=list(grover.SCHEDULE_KINDS))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--out")

    sp = add("grover-cost", cmd_grover_cost, help="search energetic cost")
    sp.add_argument("--size", type=int)
    sp.add_argument("--marked", type=int)
    sp.add_argument("--schedule", choices=list(grover.SCHEDULE_KINDS))
    sp.add_argument("--norm", choices=["frobenius", "spectral"])
    sp.add_argument("--tau", type=float)
    sp.add_argument("--superadiabatic", action="store_true")
    sp.add_argument("--out")

    sp = add("evolve", cmd_evolve, help="propagate a driven model")
    sp.add_argument("--model", choices=["ce", "grover"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--theta0", type=float)
    sp.add_argument("--size", type=int)
    sp.add_argument("--marked", type=int)
    sp.add_argument("--schedule", choices=list(grover.SCHEDULE_KINDS))
    sp.add_argument("--tau", type=float)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--no-cd", action="store_true",
                    help="drop the counter-diabatic term (adiabatic-only run)")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--trace-csv", dest="trace_csv")
    sp.add_argument("--out")

    sp = add("time-to-solution", cmd_time_to_solution,
             help="smallest tau reaching a fidelity target")
    sp.add_argument("--model", choices=["local_adiabatic", "superenergetic",
                                        "nlno", "superadiabatic"])
    sp.add_argument("--size", type=int)
    sp.add_argument("--target", type=float)
    sp.add_argument("--out")

    sp = add("table1", cmd_table1, help="energy-time complexity table")
    sp.add_argument("--n-max", dest="n_max", type=int)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--out")
    sp.add_argument("--out-svg", dest="out_svg")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args.config)
        return args.fn(args, cfg)
    except ConfigError as exc:
        print(f"stalab: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, grover.UnsupportedScheduleError) as exc:
        print(f"stalab: error: {exc}", file=sys.stderr)
        return 1
    except (qcore.NumericalFailure, cost.BracketError) as exc:
        print(f"stalab: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"stalab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
