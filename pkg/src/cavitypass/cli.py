"""Command-line front end: presets, CSV/JSON reports and figures.

Subcommands map onto the library layers: `spectrum` samples the adiabatic
branches, `evolve` runs crossing dynamics and its adiabaticity diagnostics,
`angle` tabulates mixing angles against their asymptotics, `gate` runs one
protocol and dumps its report, `scan` sweeps the entangling pass over
calibration errors.

Parameters resolve in fixed precedence: explicit command-line flags beat a
flat key=value config file, which beats a --preset, which beats the built-in
defaults.  Every CSV starts with a comment line recording the full parameter
set, so a run can be reproduced from its own output; outputs carry no
timestamps and are byte-stable.  Exit codes: 0 success, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import os
import sys
import warnings

import numpy as np

from .angle import angle_asymptotic, unit_integral
from .dynamics import (
    adiabaticity_Q,
    branch_index,
    default_tau0,
    dynamical_phase,
    evolve,
    nonadiabaticity_eps,
)
from .gates import (
    cnot_gate,
    entangle_atoms,
    fidelity_scan,
    map_atom_to_atom,
    map_atom_to_cavity,
    map_cavity_to_atom,
    phase_gate,
    swap_gate,
)
from .model import PulseConfig, coupling_envelope
from .spectrum import crossing_frame, pair_magnitudes
from . import plots

__all__ = ["main", "run", "UsageError"]

_R2 = math.sqrt(0.5)


class UsageError(Exception):
    """Bad parameters or config; maps to exit code 2."""


def _int(s):
    return int(s)


def _float(s):
    return float(s)


def _ints(s):
    if isinstance(s, tuple):
        return s
    try:
        return tuple(int(x) for x in str(s).split(",") if x.strip())
    except ValueError:
        raise UsageError(f"not an integer list: {s!r}") from None


def _floats(s):
    if isinstance(s, tuple):
        return s
    try:
        return tuple(float(x) for x in str(s).split(",") if x.strip())
    except ValueError:
        raise UsageError(f"not a number list: {s!r}") from None


def _str(s):
    return s


# Per-command parameter tables: dest -> (converter, hard default).  The
# converter runs on strings from the command line or a config file; preset
# and default values are stored already typed.
SPECTRUM_PARAMS = {
    "n": (_int, 0),
    "delta": (_float, 1.0),
    "tau_min": (_float, -4.0),
    "tau_max": (_float, 4.0),
    "tau_step": (_float, 0.01),
}

EVOLVE_PARAMS = {
    "task": (_str, "trajectory"),
    "n": (_ints, (0,)),
    "delta": (_floats, (1.0,)),
    "gsigma": (_floats, (30.0,)),
    "branch": (_str, "1'"),
    "tau0": (_float, 0.0),          # 0 means the automatic span delta + 6
    "samples": (_int, 2001),
    "tau_min": (_float, -4.0),
    "tau_max": (_float, 4.0),
    "tau_step": (_float, 0.01),
}

ANGLE_PARAMS = {
    "n": (_ints, (0,)),
    "delta": (_floats, (1.0,)),
    "gsigma": (_float, 30.0),
}

GATE_PARAMS = {
    "protocol": (_str, None),
    "mode": (_str, "ideal"),
    "delta": (_float, 1.0),
    "min_gsigma": (_float, 30.0),
    "phi": (_float, 0.0),           # 0 means the protocol's own default
    "beta1": (_float, _R2),
    "alpha2": (_float, _R2),
    "theta1": (_float, 0.0),
    "alpha": (_float, _R2),
    "beta": (_float, _R2),
    "theta": (_float, 0.0),
    "c0": (_float, _R2),
    "c1": (_float, _R2),
}

SCAN_PARAMS = {
    "sigma_errors": (_floats, tuple(round(-0.05 + 0.01 * k, 10)
                                    for k in range(11))),
    "delay_errors": (_floats, (0.0, 0.05, 0.10)),
    "mode": (_str, "dynamics"),
    "delta": (_float, 1.0),
    "theta1": (_float, 0.0),
    "min_gsigma": (_float, 30.0),
    "jobs": (_int, 1),
}

# Figure presets: owning command plus the parameter values they pin.
PRESETS = {
    "fig1": ("spectrum", {"n": 0, "delta": 1.0, "tau_min": -4.0,
                          "tau_max": 4.0, "tau_step": 0.01}),
    "fig2": ("evolve", {"task": "trajectory", "n": (0,), "delta": (1.0,),
                        "gsigma": (30.0,), "branch": "1'"}),
    "fig3": ("evolve", {"task": "qprofile", "n": (0,),
                        "delta": (0.5, 1.0, 1.25), "tau_min": -4.0,
                        "tau_max": 4.0, "tau_step": 0.01}),
    "fig4": ("evolve", {"task": "defect", "n": (0,), "delta": (1.0,),
                        "gsigma": (5.0, 10.0, 20.0), "branch": "3"}),
    "fig5": ("evolve", {"task": "defect", "n": (0, 5, 10), "delta": (1.0,),
                        "gsigma": (30.0,), "branch": "3"}),
    "fig7": ("evolve", {"task": "final-defect", "n": tuple(range(11)),
                        "delta": (1.2,), "gsigma": (10.0, 20.0, 30.0, 50.0),
                        "branch": "3"}),
    "fig6": ("scan", {}),
}


def _read_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment, blank lines skipped."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(
                        f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    return values


def _resolve(args, table: dict, command: str) -> dict:
    """Merge CLI flags, config file, preset and defaults for one command."""
    config = _read_config(args.config) if args.config else {}
    unknown = set(config) - set(table)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    preset = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}")
        owner, preset = PRESETS[args.preset]
        if owner != command:
            raise UsageError(
                f"preset {args.preset!r} belongs to the {owner} command")
    out = {}
    for dest, (conv, default) in table.items():
        v = getattr(args, dest, None)
        if v is None:
            if dest in config:
                v = conv(config[dest])
            elif dest in preset:
                v = preset[dest]
            else:
                v = default
        elif isinstance(v, str):
            v = conv(v)
        out[dest] = v
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_csv(path, params: dict, header, rows):
    """CSV with a leading comment line recording the full parameter set."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(f"{k}={_fmt(v)}" for k, v in params.items())
                 + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return path


def _tau_grid(tau_min, tau_max, tau_step):
    if tau_step <= 0:
        raise UsageError("tau-step must be positive")
    if tau_max <= tau_min:
        raise UsageError("empty tau grid: tau-max must exceed tau-min")
    npts = int(math.floor((tau_max - tau_min) / tau_step + 1e-9)) + 1
    return tau_min + tau_step * np.arange(npts)


def _params_line(command, p):
    out = {"command": command}
    for k, v in p.items():
        out[k] = ",".join(_fmt(x) for x in v) if isinstance(v, tuple) else v
    return out


_BRANCHES = ("1'", "2'", "3", "4")


def cmd_spectrum(args) -> int:
    p = _resolve(args, SPECTRUM_PARAMS, "spectrum")
    n = p["n"]
    if n < -1:
        raise UsageError("n must be >= -1")
    taus = _tau_grid(p["tau_min"], p["tau_max"], p["tau_step"])
    cfg = PulseConfig(g_sigma=1.0, delta=p["delta"])
    eta1 = coupling_envelope(1, taus, cfg)
    eta2 = coupling_envelope(2, taus, cfg)
    rows = []
    if n == -1:
        header = ["tau", "eta1", "eta2", "E1", "E2", "E3"]
        for k, t in enumerate(taus):
            _, ep = pair_magnitudes(n, t, p["delta"])
            rows.append((t, eta1[k], eta2[k], 0.0, -ep, ep))
        curve_cols = [("E1", 3), ("E2", 4), ("E3", 5)]
    else:
        # crossing-frame inner energies are +-sign(tau) E_minus, which stay
        # zero along the whole axis when delta = 0
        header = ["tau", "eta1", "eta2", "E1", "E2", "E3", "E4",
                  "E1_crossing", "E2_crossing"]
        for k, t in enumerate(taus):
            em, ep = pair_magnitudes(n, t, p["delta"])
            sgn = math.copysign(1.0, t) if t != 0.0 else 0.0
            rows.append((t, eta1[k], eta2[k], -em, em, -ep, ep,
                         sgn * em, -sgn * em))
        curve_cols = [("E1", 3), ("E2", 4), ("E3", 5), ("E4", 6),
                      ("E1'", 7), ("E2'", 8)]
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "spectrum.csv")
    write_csv(csv_path, _params_line("spectrum", p), header, rows)
    print(f"spectrum: {len(rows)} samples, n={n}, delta={p['delta']:g}")
    print(f"wrote {csv_path}")
    if not args.no_plot:
        data = np.array(rows)
        fig_path = os.path.join(args.out_dir, "spectrum.png")
        plots.save_spectrum_figure(
            fig_path, data[:, 0], (data[:, 1], data[:, 2]),
            [(label, data[:, col]) for label, col in curve_cols],
            title=f"n={n}, delta={p['delta']:g}")
        print(f"wrote {fig_path}")
    return 0


def _single_value(p, key):
    values = p[key]
    if len(values) != 1:
        raise UsageError(f"{key} must be a single value for this task")
    return values[0]


def _evolve_trajectory(args, p) -> int:
    n = int(_single_value(p, "n"))
    delta = _single_value(p, "delta")
    gs = _single_value(p, "gsigma")
    branch = p["branch"]
    if branch not in _BRANCHES:
        raise UsageError("branch must be one of 1', 2', 3, 4")
    col = branch_index(n, branch)
    cfg = PulseConfig(g_sigma=gs, delta=delta)
    tau0 = p["tau0"] if p["tau0"] > 0 else default_tau0(cfg)
    psi0 = crossing_frame(n, -tau0, cfg).states[:, col].astype(complex)
    res = evolve(n, psi0, cfg, (-tau0, tau0), n_samples=p["samples"])
    eps = nonadiabaticity_eps(res, branch)
    ovl = np.empty(res.tau.size, dtype=complex)
    for k, t in enumerate(res.tau):
        ref = crossing_frame(n, t, cfg).states[:, col]
        ovl[k] = np.vdot(ref, res.states[:, k])
    ovl2 = np.abs(ovl) ** 2
    header = ["tau"] + [f"p{i + 1}" for i in range(res.states.shape[0])] + \
        ["overlap2", "eps"]
    rows = []
    for k, t in enumerate(res.tau):
        rows.append((t, *np.abs(res.states[:, k]) ** 2, ovl2[k], eps[k]))
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "evolve_trajectory.csv")
    write_csv(csv_path, _params_line("evolve", p), header, rows)
    summary = {
        "task": "trajectory", "n": n, "delta": delta, "gsigma": gs,
        "branch": branch, "tau0": tau0,
        "min_overlap2": float(np.min(ovl2)),
        "final_overlap2": float(ovl2[-1]),
        "im_final_overlap": float(np.imag(ovl[-1])),
        "norm_drift": res.norm_drift,
        "dynamical_phase": {b: dynamical_phase(n, b, cfg, (-tau0, tau0))
                            for b in ("1'", "2'", "3", "4")},
    }
    json_path = os.path.join(args.out_dir, "evolve_summary.json")
    write_json(json_path, summary)
    print(f"evolve trajectory: branch {branch}, n={n}, delta={delta:g}, "
          f"gsigma={gs:g}")
    print(f"min overlap^2 {summary['min_overlap2']:.6f}, "
          f"final {summary['final_overlap2']:.6f}, "
          f"Im final overlap {summary['im_final_overlap']:+.3e}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if not args.no_plot:
        fig_path = os.path.join(args.out_dir, "evolve_trajectory.png")
        plots.save_lines(fig_path, res.tau,
                         [(f"|<branch {branch}|psi>|^2", ovl2)],
                         "tau", "projection",
                         title=f"n={n}, delta={delta:g}, gsigma={gs:g}")
        print(f"wrote {fig_path}")
    return 0


def _evolve_qprofile(args, p) -> int:
    n = int(_single_value(p, "n"))
    taus = _tau_grid(p["tau_min"], p["tau_max"], p["tau_step"])
    header = ["tau"]
    cols = []
    for delta in p["delta"]:
        cfg = PulseConfig(g_sigma=1.0, delta=delta)
        q13 = np.empty(taus.size)
        q14 = np.empty(taus.size)
        for k, t in enumerate(taus):
            # the instantaneous basis is degenerate exactly at tau = 0;
            # evaluate the crossing sample just on the left side
            tt = t if t != 0.0 else -1e-9
            q13[k] = adiabaticity_Q(n, 1, 3, tt, cfg)
            q14[k] = adiabaticity_Q(n, 1, 4, tt, cfg)
        header += [f"Q13_d{delta:g}", f"Q14_d{delta:g}"]
        cols += [q13, q14]
    rows = [(t, *(c[k] for c in cols)) for k, t in enumerate(taus)]
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "evolve_qprofile.csv")
    write_csv(csv_path, _params_line("evolve", p), header, rows)
    for j, delta in enumerate(p["delta"]):
        print(f"delta={delta:g}: max Q13 = {np.max(cols[2 * j]):.4f}")
    print(f"wrote {csv_path}")
    if not args.no_plot:
        fig_path = os.path.join(args.out_dir, "evolve_qprofile.png")
        plots.save_lines(
            fig_path, taus,
            [(f"Q13, delta={d:g}", cols[2 * j])
             for j, d in enumerate(p["delta"])],
            "tau", "Q13", title=f"n={n}")
        print(f"wrote {fig_path}")
    return 0


def _evolve_defect(args, p) -> int:
    delta = _single_value(p, "delta")
    branch = p["branch"]
    if branch not in _BRANCHES:
        raise UsageError("branch must be one of 1', 2', 3, 4")
    combos = [(int(n), gs) for n in p["n"] for gs in p["gsigma"]]
    header = ["tau"]
    cols = []
    tau_axis = None
    for n, gs in combos:
        cfg = PulseConfig(g_sigma=gs, delta=delta)
        tau0 = p["tau0"] if p["tau0"] > 0 else default_tau0(cfg)
        col = branch_index(n, branch)
        psi0 = crossing_frame(n, -tau0, cfg).states[:, col].astype(complex)
        res = evolve(n, psi0, cfg, (-tau0, tau0), n_samples=p["samples"])
        cols.append(nonadiabaticity_eps(res, branch))
        tau_axis = res.tau
        header.append(f"eps{branch.rstrip(chr(39))}_n{n}_gs{gs:g}")
    rows = [(t, *(c[k] for c in cols)) for k, t in enumerate(tau_axis)]
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "evolve_defect.csv")
    write_csv(csv_path, _params_line("evolve", p), header, rows)
    summary = {"task": "defect", "delta": delta, "branch": branch,
               "curves": [{"n": n, "gsigma": gs,
                           "max_eps": float(np.max(c)),
                           "final_eps": float(c[-1])}
                          for (n, gs), c in zip(combos, cols)]}
    json_path = os.path.join(args.out_dir, "evolve_summary.json")
    write_json(json_path, summary)
    for item in summary["curves"]:
        print(f"n={item['n']}, gsigma={item['gsigma']:g}: "
              f"max eps{branch} = {item['max_eps']:.3e}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if not args.no_plot:
        fig_path = os.path.join(args.out_dir, "evolve_defect.png")
        plots.save_lines(
            fig_path, tau_axis,
            [(f"n={n}, gsigma={gs:g}", np.clip(c, 1e-18, None))
             for (n, gs), c in zip(combos, cols)],
            "tau", f"eps {branch}", logy=True,
            title=f"delta={delta:g}")
        print(f"wrote {fig_path}")
    return 0


def _evolve_final_defect(args, p) -> int:
    delta = _single_value(p, "delta")
    branch = p["branch"]
    if branch not in _BRANCHES:
        raise UsageError("branch must be one of 1', 2', 3, 4")
    ns = [int(n) for n in p["n"]]
    header = ["n"] + [f"eps_gs{gs:g}" for gs in p["gsigma"]]
    table = np.empty((len(ns), len(p["gsigma"])))
    for j, gs in enumerate(p["gsigma"]):
        cfg = PulseConfig(g_sigma=gs, delta=delta)
        tau0 = p["tau0"] if p["tau0"] > 0 else default_tau0(cfg)
        for i, n in enumerate(ns):
            col = branch_index(n, branch)
            psi0 = crossing_frame(n, -tau0, cfg).states[:, col]
            res = evolve(n, psi0.astype(complex), cfg, (-tau0, tau0),
                         n_samples=2)
            table[i, j] = nonadiabaticity_eps(res, branch)[-1]
    rows = [(n, *table[i]) for i, n in enumerate(ns)]
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "evolve_final_defect.csv")
    write_csv(csv_path, _params_line("evolve", p), header, rows)
    for j, gs in enumerate(p["gsigma"]):
        print(f"gsigma={gs:g}: final eps{branch} spans "
              f"{np.min(table[:, j]):.3e} .. {np.max(table[:, j]):.3e}")
    print(f"wrote {csv_path}")
    if not args.no_plot:
        fig_path = os.path.join(args.out_dir, "evolve_final_defect.png")
        plots.save_lines(
            fig_path, np.array(ns, dtype=float),
            [(f"gsigma={gs:g}", np.clip(table[:, j], 1e-18, None))
             for j, gs in enumerate(p["gsigma"])],
            "n", f"final eps {branch}", logy=True,
            title=f"delta={delta:g}")
        print(f"wrote {fig_path}")
    return 0


def cmd_evolve(args) -> int:
    p = _resolve(args, EVOLVE_PARAMS, "evolve")
    task = p["task"]
    if task == "trajectory":
        return _evolve_trajectory(args, p)
    if task == "qprofile":
        return _evolve_qprofile(args, p)
    if task == "defect":
        return _evolve_defect(args, p)
    if task == "final-defect":
        return _evolve_final_defect(args, p)
    raise UsageError(
        "task must be trajectory, qprofile, defect or final-defect")


def cmd_angle(args) -> int:
    p = _resolve(args, ANGLE_PARAMS, "angle")
    gs = p["gsigma"]
    header = ["n", "delta", "gsigma", "unit_integral", "phi",
              "phi_separated", "phi_overlapped", "phi_large_n",
              "ratio_large_n"]
    rows = []
    for n in p["n"]:
        for delta in p["delta"]:
            I = unit_integral(int(n), delta)
            phi = 2.0 * gs * I
            cfg = PulseConfig(g_sigma=gs, delta=delta)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                sep = angle_asymptotic(int(n), cfg, "separated")
                try:
                    ovl = angle_asymptotic(int(n), cfg, "overlapped")
                except ValueError:
                    ovl = math.nan
                try:
                    large = angle_asymptotic(int(n), cfg, "large_n")
                except ValueError:
                    large = math.nan
            ratio = phi / large if large > 0 else math.nan
            rows.append((int(n), delta, gs, I, phi, sep, ovl, large, ratio))
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "angle.csv")
    write_csv(csv_path, _params_line("angle", p), header, rows)
    print(f"angle: {len(rows)} rows, gsigma={gs:g}")
    print(f"wrote {csv_path}")
    if not args.no_plot and len(p["delta"]) > 1 and len(p["n"]) == 1:
        data = np.array(rows)
        fig_path = os.path.join(args.out_dir, "angle.png")
        plots.save_lines(
            fig_path, data[:, 1],
            [("quadrature", data[:, 4]), ("separated", data[:, 5]),
             ("overlapped", data[:, 6])],
            "delta", "phi", title=f"n={int(p['n'][0])}, gsigma={gs:g}")
        print(f"wrote {fig_path}")
    return 0


def cmd_gate(args) -> int:
    p = _resolve(args, GATE_PARAMS, "gate")
    protocol = p["protocol"]
    if protocol is None:
        raise UsageError("gate needs --protocol (swap, phase, cnot, "
                         "entangle, map-atom-atom, map-cavity-atom, "
                         "map-atom-cavity)")
    mode, delta, min_gs = p["mode"], p["delta"], p["min_gsigma"]
    phi = p["phi"]
    if protocol in ("swap", "phase", "cnot"):
        fn = {"swap": swap_gate, "phase": phase_gate, "cnot": cnot_gate}
        report = fn[protocol](mode=mode, delta=delta, min_gsigma=min_gs)
        payload = report.as_dict()
        for label in sorted(report.input_fidelities):
            print(f"{label}: fidelity {report.input_fidelities[label]:.6f}, "
                  f"leak {report.input_leaks[label]:.3e}")
    elif protocol == "entangle":
        beta1, alpha2 = p["beta1"], p["alpha2"]
        alpha1 = math.sqrt(max(0.0, 1.0 - beta1 * beta1))
        beta2 = math.sqrt(max(0.0, 1.0 - alpha2 * alpha2))
        res = entangle_atoms(alpha1, beta1, p["theta1"], alpha2, beta2, 0.0,
                             phi if phi > 0 else 2.0 * math.pi,
                             mode=mode, delta=delta, min_gsigma=min_gs)
        payload = res.report.as_dict()
        payload["p_en"] = res.p_en
        payload["concurrence"] = res.concurrence
        payload["conditional"] = [[float(z.real), float(z.imag)]
                                  for z in res.conditional]
        print(f"entangle: p_en {res.p_en:.6f}, "
              f"concurrence {res.concurrence:.6f}, "
              f"fidelity {res.report.fidelity:.6f}")
    elif protocol in ("map-atom-atom", "map-cavity-atom", "map-atom-cavity"):
        if protocol == "map-atom-atom":
            report = map_atom_to_atom(
                p["alpha"], p["beta"], p["theta"], mode=mode,
                phi=phi if phi > 0 else math.pi, delta=delta,
                min_gsigma=min_gs)
        elif protocol == "map-cavity-atom":
            report = map_cavity_to_atom(
                p["c0"], p["c1"], mode=mode,
                phi=phi if phi > 0 else 0.5 * math.pi, delta=delta,
                min_gsigma=min_gs)
        else:
            report = map_atom_to_cavity(
                p["alpha"], p["beta"], p["theta"], mode=mode,
                phi=phi if phi > 0 else 0.5 * math.pi, delta=delta,
                min_gsigma=min_gs)
        payload = report.as_dict()
        print(f"{protocol}: fidelity {report.fidelity:.6f}, "
              f"leak {report.leak:.3e}")
    else:
        raise UsageError(f"unknown protocol {protocol!r}")
    os.makedirs(args.out_dir, exist_ok=True)
    json_path = os.path.join(args.out_dir,
                             f"gate_{protocol.replace('-', '_')}.json")
    write_json(json_path, payload)
    print(f"wrote {json_path}")
    return 0


def _scan_job(job):
    x, delays, mode, delta, theta1, min_gs = job
    report = fidelity_scan(sigma_errors=(x,), delay_errors=delays, mode=mode,
                           delta=delta, theta1=theta1, min_gsigma=min_gs)
    return report.scan


def cmd_scan(args) -> int:
    p = _resolve(args, SCAN_PARAMS, "scan")
    if not p["sigma_errors"] or not p["delay_errors"]:
        raise UsageError("empty scan grid")
    if p["jobs"] < 1:
        raise UsageError("jobs must be >= 1")
    if p["jobs"] == 1:
        report = fidelity_scan(sigma_errors=p["sigma_errors"],
                               delay_errors=p["delay_errors"],
                               mode=p["mode"], delta=p["delta"],
                               theta1=p["theta1"],
                               min_gsigma=p["min_gsigma"])
        rows = report.scan
    else:
        jobs = [(x, p["delay_errors"], p["mode"], p["delta"], p["theta1"],
                 p["min_gsigma"]) for x in p["sigma_errors"]]
        with multiprocessing.Pool(p["jobs"]) as pool:
            chunks = pool.map(_scan_job, jobs)
        rows = [row for chunk in chunks for row in chunk]
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "scan.csv")
    write_csv(csv_path, _params_line("scan", p),
              ["dσ_rel", "dΔt_rel", "fidelity", "P_leak"], rows)
    fids = [r[2] for r in rows]
    print(f"scan: {len(rows)} points, fidelity "
          f"{min(fids):.6f} .. {max(fids):.6f}")
    print(f"wrote {csv_path}")
    if not args.no_plot:
        fig_path = os.path.join(args.out_dir, "scan.png")
        plots.save_scan_figure(fig_path, rows,
                               title=f"delta={p['delta']:g}, "
                                     f"mode={p['mode']}")
        print(f"wrote {fig_path}")
    return 0


def _add_common(sub):
    sub.add_argument("--out-dir", default=".", help="output directory")
    sub.add_argument("--preset", default=None,
                     help="figure preset (fig1..fig7)")
    sub.add_argument("--config", default=None,
                     help="flat key=value config file")
    sub.add_argument("--no-plot", action="store_true",
                     help="skip the PNG figure")


def _add_table_flags(sub, table, helps):
    for dest in table:
        flag = "--" + dest.replace("_", "-")
        sub.add_argument(flag, default=None, dest=dest,
                         help=helps.get(dest, ""))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavitypass",
        description="Two delayed atoms crossing a cavity mode: spectra, "
                    "crossing dynamics, mixing angles and gate protocols.")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="adiabatic branches on a tau grid")
    _add_table_flags(sp, SPECTRUM_PARAMS, {
        "n": "background photon number (>= -1)",
        "delta": "half delay between the atoms",
        "tau_min": "grid start", "tau_max": "grid end",
        "tau_step": "grid step"})
    _add_common(sp)
    sp.set_defaults(func=cmd_spectrum)

    ev = subs.add_parser("evolve", help="crossing dynamics and diagnostics")
    _add_table_flags(ev, EVOLVE_PARAMS, {
        "task": "trajectory, qprofile, defect or final-defect",
        "n": "photon number(s), comma separated",
        "delta": "half delay(s), comma separated",
        "gsigma": "pulse strength(s), comma separated",
        "branch": "adiabatic branch: 1', 2', 3 or 4",
        "tau0": "half span (0 = automatic delta + 6)",
        "samples": "stored samples per trajectory",
        "tau_min": "qprofile grid start",
        "tau_max": "qprofile grid end",
        "tau_step": "qprofile grid step"})
    _add_common(ev)
    ev.set_defaults(func=cmd_evolve)

    an = subs.add_parser("angle", help="mixing angles vs asymptotics")
    _add_table_flags(an, ANGLE_PARAMS, {
        "n": "photon number(s), comma separated",
        "delta": "half delay(s), comma separated",
        "gsigma": "pulse strength"})
    _add_common(an)
    an.set_defaults(func=cmd_angle)

    ga = subs.add_parser("gate", help="run one protocol, dump its report")
    _add_table_flags(ga, GATE_PARAMS, {
        "protocol": "swap, phase, cnot, entangle, map-atom-atom, "
                    "map-cavity-atom or map-atom-cavity",
        "mode": "ideal or dynamics",
        "delta": "half delay",
        "min_gsigma": "floor for the solved pulse strength",
        "phi": "pass angle override (0 = protocol default)",
        "beta1": "entangle: excited amplitude of atom 1",
        "alpha2": "entangle: ground amplitude of atom 2",
        "theta1": "entangle: phase of atom 1",
        "alpha": "map protocols: ground amplitude",
        "beta": "map protocols: excited amplitude",
        "theta": "map protocols: phase",
        "c0": "cavity map: vacuum amplitude",
        "c1": "cavity map: one-photon amplitude"})
    _add_common(ga)
    ga.set_defaults(func=cmd_gate)

    sc = subs.add_parser("scan", help="entangling-pass fidelity vs errors")
    _add_table_flags(sc, SCAN_PARAMS, {
        "sigma_errors": "relative interaction-time errors, comma separated",
        "delay_errors": "relative delay errors, comma separated",
        "mode": "ideal or dynamics",
        "delta": "nominal half delay",
        "theta1": "phase of atom 1",
        "min_gsigma": "floor for the solved pulse strength",
        "jobs": "worker processes for the grid"})
    _add_common(sc)
    sc.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
