"""Sweep orchestration: task fan-out, persistence, analysis and plot tables.

Output tree::

    config.yaml              canonical copy of the parsed config
    manifest.json            hashes, seeds, task status, timestamps, inventory
    traces/cell_tXXX_uYYY.tsv     one file per (theta, tau1) cell, all seeds
    spectra/cell_tXXX_uYYY.tsv    late-window spectra per seed
    fractions.tsv            f per (theta, tau1, seed)
    fractions_mean.tsv       disorder-averaged f per (theta, tau1)
    boundary.tsv             super-Gaussian boundary per tau1
    meanfield_boundary.tsv, order_parameter.tsv     mean-field scan
    plotdata/figN_*.tsv      long-format plot tables

Every table is tab-separated with a ``name[unit]`` header row.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
import shutil
import time
import traceback
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

import dtckit
from dtckit import analysis, kernels
from dtckit.config import SweepConfig, parse_config
from dtckit.disorder import EnsembleParams, j0_for_coupling, make_realization
from dtckit.floquet import ProtocolConfig, commensurate_tau1, run
from dtckit.meanfield import DisorderSamples, phase_boundary

MANIFEST = "manifest.json"
FIGURES = ("fig1", "fig2", "fig3", "fig4")


class MissingInputs(FileNotFoundError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing inputs: " + ", ".join(self.missing))


# ---------------------------------------------------------------- tables

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_table(path, columns, rows):
    """``columns`` are ``(name, unit)`` pairs; the header reads ``name[unit]``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow([f"{n}[{u}]" for n, u in columns])
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def read_table(path):
    """Columns keyed by bare name; numeric columns become float arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    names = [h.split("[", 1)[0] for h in rows[0]]
    out = {}
    for j, name in enumerate(names):
        col = [r[j] for r in rows[1:]]
        try:
            out[name] = np.array([float(c) for c in col])
        except ValueError:
            out[name] = col
    return out


# ----------------------------------------------------------------- seeds

def derive_seed(master_seed, *parts):
    """Stable 63-bit seed from the master seed and task-identifying values."""
    key = repr((int(master_seed),) + tuple(parts)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big") >> 1


@dataclass(frozen=True)
class Task:
    index: int
    i_theta: int
    i_tau: int
    seed_index: int
    theta: float
    tau1: float
    realization_seed: int
    task_seed: int

    @property
    def cell(self):
        return f"cell_t{self.i_theta:03d}_u{self.i_tau:03d}"


def build_tasks(cfg: SweepConfig, master_seed=None):
    """Immutable task list. The realization seed depends only on the seed
    index, so every cell sees the same disorder draws; the task seed hashes
    the (theta, tau1, seed) values so extra grid points leave existing
    streams untouched."""
    master = cfg.sweep.master_seed if master_seed is None else master_seed
    tasks = []
    for i, th in enumerate(cfg.sweep.theta):
        for j, tau in enumerate(cfg.sweep.tau1):
            for k in range(cfg.sweep.seeds):
                tasks.append(Task(len(tasks), i, j, k, th, tau,
                                  derive_seed(master, "realization", k),
                                  derive_seed(master, "task", th, tau, k)))
    return tasks


def build_realization(cfg: SweepConfig, n_spins, seed):
    e = cfg.ensemble
    params = EnsembleParams(n_spins, r0=e.r0, r_min=e.r_min,
                            J0=j0_for_coupling(e.coupling_at_r0, e.r0), W=e.W,
                            seed=seed, angular=e.angular)
    r = make_realization(params)
    return r if e.coupling_scale == 1.0 else r.scaled(e.coupling_scale)


def protocol_for(cfg: SweepConfig, task: Task) -> ProtocolConfig:
    p = cfg.protocol
    tau1 = task.tau1
    if p.variant == "Z2" and p.commensurate:
        tau1 = commensurate_tau1(tau1, p.omega_x)
    return ProtocolConfig(
        realization=build_realization(cfg, p.n_spins, task.realization_seed),
        theta=task.theta, tau1=tau1, variant=p.variant, omega_x=p.omega_x,
        omega_y=p.omega_y, n_cycles=p.n_cycles, pulse_mode=p.pulse_mode,
        hamiltonian=p.hamiltonian, initial_state=p.initial_state, tilt=p.tilt,
        envelope_t1rho=p.envelope_t1rho, pulse_errors=p.pulse_errors,
        angle_jitter=p.angle_jitter, seed=task.task_seed)


# ---------------------------------------------------------------- workers

def _execute_task(task: Task, cfg: SweepConfig):
    pc = protocol_for(cfg, task)
    tr = run(pc)
    out = {"values": tr.values.tolist(), "period": tr.period, "tau1": pc.tau1}
    if tr.populations is not None:
        out["populations"] = {k: v.tolist() for k, v in tr.populations.items()}
    return out


def _simulate_worker(args):
    task, cfg_dict, scratch = args
    try:
        result = _execute_task(task, parse_config(cfg_dict))
        with open(Path(scratch) / f"task_{task.index:06d}.json", "w") as fh:
            json.dump(result, fh)
        return task.index, None
    except Exception as exc:  # recorded per task, siblings continue
        return task.index, f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}"


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------- manifest

def _timestamp(t=None):
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        t = float(epoch)
    elif t is None:
        t = time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def inventory(out_dir):
    out_dir = Path(out_dir)
    return {str(p.relative_to(out_dir)): _sha256(p)
            for p in sorted(out_dir.rglob("*")) if p.is_file() and p.name != MANIFEST}


def update_manifest(out_dir, verb, entry):
    out_dir = Path(out_dir)
    path = out_dir / MANIFEST
    man = json.loads(path.read_text()) if path.exists() else {}
    man.update({"toolkit": "dtckit", "version": dtckit.__version__, "backend": kernels.BACKEND})
    man.setdefault("runs", {})[verb] = entry
    man["inventory"] = inventory(out_dir)
    path.write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
    return man


def _write_config(cfg, out_dir):
    (Path(out_dir) / "config.yaml").write_text(cfg.serialize())


# --------------------------------------------------------------- simulate

@dataclass
class RunResult:
    out_dir: Path
    n_tasks: int
    failures: dict

    @property
    def exit_code(self):
        return 1 if self.failures else 0


def run_sweep(cfg: SweepConfig, out_dir=None, workers=None, master_seed=None) -> RunResult:
    """Run every (theta, tau1, seed) task, then analyze the traces."""
    if master_seed is not None:
        cfg = cfg.replace(sweep__master_seed=int(master_seed))
    out_dir = Path(out_dir or cfg.output)
    workers = workers or cfg.workers
    started = _timestamp()
    out_dir.mkdir(parents=True, exist_ok=True)
    scratch = out_dir / ".scratch"
    shutil.rmtree(scratch, ignore_errors=True)
    scratch.mkdir()
    for sub in ("traces", "spectra"):
        shutil.rmtree(out_dir / sub, ignore_errors=True)

    tasks = build_tasks(cfg)
    cfg_dict = cfg.to_dict()
    results = _map(_simulate_worker, [(t, cfg_dict, str(scratch)) for t in tasks], workers)
    failures = {i: err for i, err in results if err is not None}

    # single-threaded merge of task-private files into one file per cell
    cells = defaultdict(list)
    for t in tasks:
        if t.index not in failures:
            cells[t.cell].append(t)
    z3 = cfg.protocol.variant == "Z3"
    cols = [("theta", "rad"), ("tau1", "us"), ("seed", "1"), ("n", "1"), ("t", "us"), ("P", "1")]
    if z3:
        cols += [("p_plus1", "1"), ("p_0", "1"), ("p_minus1", "1")]
    for cell, ts in sorted(cells.items()):
        rows = []
        for t in sorted(ts, key=lambda t: t.seed_index):
            res = json.loads((scratch / f"task_{t.index:06d}.json").read_text())
            for n, v in enumerate(res["values"]):
                row = [t.theta, res["tau1"], t.seed_index, n, n * res["period"], v]
                if z3:
                    row += [res["populations"][k][n] for k in ("1", "0", "-1")]
                rows.append(row)
        write_table(out_dir / "traces" / f"{cell}.tsv", cols, rows)
    shutil.rmtree(scratch)

    _write_config(cfg, out_dir)
    analyze_tree(out_dir, cfg)
    entry = {
        "config_hash": cfg.config_hash(),
        "master_seed": cfg.sweep.master_seed,
        "tasks": [dict(asdict(t), status="failed" if t.index in failures else "ok",
                       error=failures.get(t.index)) for t in tasks],
        "failures": len(failures),
        "timestamps": {"started": started, "finished": _timestamp()},
    }
    update_manifest(out_dir, "simulate", entry)
    return RunResult(out_dir, len(tasks), failures)


def load_traces(out_dir):
    """{(theta, tau1): {"seeds": [...], "P": 2-D array, "period": T, ...}}."""
    out = {}
    files = sorted((Path(out_dir) / "traces").glob("cell_*.tsv"))
    for f in files:
        tab = read_table(f)
        seeds = np.unique(tab["seed"]).astype(int)
        key = (float(tab["theta"][0]), float(tab["tau1"][0]))
        cell = {"file": f.stem, "seeds": seeds.tolist(), "P": [], "pops": []}
        for s in seeds:
            sel = tab["seed"] == s
            cell["P"].append(tab["P"][sel])
            if "p_0" in tab:
                cell["pops"].append(np.stack([tab["p_plus1"][sel], tab["p_0"][sel],
                                              tab["p_minus1"][sel]]))
        t = tab["t"][tab["seed"] == seeds[0]]
        cell["period"] = float(t[1] - t[0]) if len(t) > 1 else float("nan")
        cell["P"] = np.array(cell["P"])
        out[key] = cell
    return out


# ---------------------------------------------------------------- analyze

def analyze_tree(out_dir, cfg: SweepConfig):
    """Spectra, fractions and boundary fits from the stored traces."""
    out_dir = Path(out_dir)
    cells = load_traces(out_dir)
    if not cells:
        raise MissingInputs([str(out_dir / "traces" / "cell_*.tsv")])
    a = cfg.analysis
    window = tuple(a.window)
    shutil.rmtree(out_dir / "spectra", ignore_errors=True)

    frac_rows, mean_rows = [], []
    for (theta, tau1), cell in sorted(cells.items()):
        spec_rows, fs, dfs = [], [], []
        for s, P in zip(cell["seeds"], cell["P"]):
            sp = analysis.spectrum(P, window)
            fc = analysis.crystalline_fraction(sp, a.target_nu)
            frac_rows.append([theta, tau1, s, fc.f, fc.delta_f, fc.sigma_n])
            fs.append(fc.f)
            dfs.append(fc.delta_f)
            for k in range(sp.N):
                S = sp.amplitudes[k]
                spec_rows.append([s, k, sp.nu[k], S.real, S.imag, abs(S) ** 2])
        write_table(out_dir / "spectra" / f"{cell['file']}.tsv",
                    [("seed", "1"), ("k", "1"), ("nu", "1/T"), ("re_S", "1"), ("im_S", "1"),
                     ("power", "1")], spec_rows)
        fs, dfs = np.array(fs), np.array(dfs)
        mean_rows.append([theta, tau1, len(fs), float(np.mean(fs)), float(np.std(fs)),
                          float(np.sqrt(np.sum(dfs**2)) / len(dfs))])

    write_table(out_dir / "fractions.tsv",
                [("theta", "rad"), ("tau1", "us"), ("seed", "1"), ("f", "1"), ("delta_f", "1"),
                 ("sigma_n", "1")], frac_rows)
    write_table(out_dir / "fractions_mean.tsv",
                [("theta", "rad"), ("tau1", "us"), ("n_seeds", "1"), ("f", "1"), ("f_std", "1"),
                 ("delta_f", "1")], mean_rows)

    by_tau = defaultdict(list)
    for r in mean_rows:
        by_tau[r[1]].append(r)
    b_rows = []
    for tau1 in sorted(by_tau):
        rs = sorted(by_tau[tau1])
        th = np.array([r[0] for r in rs])
        f = np.array([r[3] for r in rs])
        df = np.array([r[5] for r in rs])
        try:
            b = analysis.boundary_from_fractions(th, f, df, a.threshold)
            b_rows.append([tau1, b.theta0, b.sigma_minus, b.sigma_plus, b.p, b.f_max,
                           b.theta_minus, b.theta_minus_err, b.theta_plus, b.theta_plus_err,
                           b.status])
        except ValueError as exc:
            b_rows.append([tau1] + [float("nan")] * 9 + [f"not fitted: {exc}"])
    write_table(out_dir / "boundary.tsv",
                [("tau1", "us"), ("theta0", "rad"), ("sigma_minus", "rad"),
                 ("sigma_plus", "rad"), ("p", "1"), ("f_max", "1"), ("theta_minus", "rad"),
                 ("theta_minus_err", "rad"), ("theta_plus", "rad"), ("theta_plus_err", "rad"),
                 ("status", "-")], b_rows)
    return mean_rows, b_rows


def analyze(out_dir, cfg: SweepConfig = None):
    """Re-run the analysis stage on an existing output tree."""
    out_dir = Path(out_dir)
    if cfg is None:
        path = out_dir / "config.yaml"
        if not path.exists():
            raise MissingInputs([str(path)])
        from dtckit.config import load_config
        cfg = load_config(path)
    started = _timestamp()
    analyze_tree(out_dir, cfg)
    update_manifest(out_dir, "analyze", {
        "config_hash": cfg.config_hash(),
        "timestamps": {"started": started, "finished": _timestamp()}})


# -------------------------------------------------------------- meanfield

def meanfield_samples(cfg: SweepConfig, master_seed):
    m = cfg.meanfield
    if m.jbar is not None:
        n = m.samples
        if m.onsite_disorder:
            rng = np.random.default_rng(derive_seed(master_seed, "meanfield-delta"))
            delta = rng.normal(0.0, cfg.ensemble.W, size=n)
        else:
            delta = np.zeros(n)
        return DisorderSamples(np.full(n, float(m.jbar)), delta)
    jb, de = [], []
    k = 0
    while sum(map(len, jb)) < m.samples:
        r = build_realization(cfg, m.n_spins, derive_seed(master_seed, "meanfield", k))
        jb.append(r.jbar)
        de.append(r.onsite_fields if m.onsite_disorder else np.zeros(r.n_spins))
        k += 1
    return DisorderSamples(np.concatenate(jb), np.concatenate(de))


def _meanfield_worker(args):
    tau1, theta_grid, jbar, delta, omega_y, threshold, closure = args
    try:
        pb = phase_boundary([tau1], theta_grid, DisorderSamples(jbar, delta), omega_y,
                            threshold, closure, min_samples=1)
        return (pb.theta_minus[0], pb.theta_plus[0], pb.status[0],
                pb.order_parameter_map[0].tolist(), pb.unconverged), None
    except Exception as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_meanfield(cfg: SweepConfig, out_dir=None, workers=None, master_seed=None) -> RunResult:
    """Disorder-averaged mean-field boundary scan, one task per tau1."""
    if master_seed is not None:
        cfg = cfg.replace(sweep__master_seed=int(master_seed))
    out_dir = Path(out_dir or cfg.output)
    workers = workers or cfg.workers
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _timestamp()
    m = cfg.meanfield
    samples = meanfield_samples(cfg, cfg.sweep.master_seed)
    theta_grid = sorted(m.theta)
    tau1_grid = m.tau1
    args = [(t, theta_grid, samples.jbar, samples.delta, m.omega_y, cfg.analysis.threshold,
             m.closure) for t in tau1_grid]
    results = _map(_meanfield_worker, args, workers)
    failures = {i: err for i, (_, err) in enumerate(results) if err is not None}

    b_rows, op_rows = [], []
    for tau1, (res, err) in zip(tau1_grid, results):
        if err is not None:
            b_rows.append([tau1, float("nan"), float("nan"), "failed"])
            continue
        tm, tp, status, op, _ = res
        b_rows.append([tau1, tm, tp, status])
        op_rows.extend([tau1, th, v] for th, v in zip(theta_grid, op))
    write_table(out_dir / "meanfield_boundary.tsv",
                [("tau1", "us"), ("theta_minus", "rad"), ("theta_plus", "rad"), ("status", "-")],
                b_rows)
    write_table(out_dir / "order_parameter.tsv",
                [("tau1", "us"), ("theta", "rad"), ("order_parameter", "1")], op_rows)
    _write_config(cfg, out_dir)
    update_manifest(out_dir, "meanfield", {
        "config_hash": cfg.config_hash(),
        "master_seed": cfg.sweep.master_seed,
        "n_samples": len(samples),
        "tasks": [{"index": i, "tau1": t, "status": "failed" if i in failures else "ok",
                   "error": failures.get(i)} for i, t in enumerate(tau1_grid)],
        "failures": len(failures),
        "timestamps": {"started": started, "finished": _timestamp()},
    })
    return RunResult(out_dir, len(tau1_grid), failures)


# --------------------------------------------------------------- plotdata

def _require(out_dir, names):
    missing = [str(Path(out_dir) / n) for n in names if not (Path(out_dir) / n).exists()]
    if missing:
        raise MissingInputs(missing)


def emit_plotdata(out_dir, figure, cfg: SweepConfig = None):
    """Write long-format plot tables for one figure; returns their paths."""
    out_dir = Path(out_dir)
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
    if figure in ("fig1", "fig2", "fig4"):
        _require(out_dir, ["config.yaml", "traces"])
    else:
        _require(out_dir, ["fractions_mean.tsv", "boundary.tsv"])
    if cfg is None and (out_dir / "config.yaml").exists():
        from dtckit.config import load_config
        cfg = load_config(out_dir / "config.yaml")
    pd = out_dir / "plotdata"
    return {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4}[figure](out_dir, pd, cfg)


def _cells(out_dir):
    cells = load_traces(out_dir)
    if not cells:
        raise MissingInputs([str(out_dir / "traces" / "cell_*.tsv")])
    return sorted(cells.items())


def _freq_rows(theta, tau1, mean, window):
    sp = analysis.spectrum(mean, window)
    tot = sp.total_power
    rows = []
    for k in range(sp.N):
        nu = sp.nu[k]
        rows.append([theta, tau1, k, nu, nu if nu <= 0.5 else nu - 1.0, sp.power[k],
                     sp.power[k] / tot if tot > 0 else 0.0])
    return rows


_FREQ_COLS = [("theta", "rad"), ("tau1", "us"), ("k", "1"), ("nu", "1/T"),
              ("nu_centered", "1/T"), ("power", "1"), ("power_norm", "1")]


def _fig1(out_dir, pd, cfg):
    time_rows, freq_rows = [], []
    for (theta, tau1), c in _cells(out_dir):
        mean = c["P"].mean(axis=0)
        for n, v in enumerate(mean):
            time_rows.append([theta, tau1, n, n * c["period"], v])
        freq_rows += _freq_rows(theta, tau1, mean, tuple(cfg.analysis.window))
    paths = [pd / "fig1_time.tsv", pd / "fig1_freq.tsv"]
    write_table(paths[0], [("theta", "rad"), ("tau1", "us"), ("n", "1"), ("t", "us"),
                           ("P", "1")], time_rows)
    write_table(paths[1], _FREQ_COLS, freq_rows)
    return paths


def _fig2(out_dir, pd, cfg):
    stft_rows, fit_rows = [], []
    m = cfg.analysis.stft_window
    for (theta, tau1), c in _cells(out_dir):
        mean = c["P"].mean(axis=0)
        try:
            lt = analysis.dtc_lifetime(mean, m, cfg.analysis.target_nu, period=c["period"])
            fit, pk = lt.fit, lt.stft
            curve = fit.curve(pk.n_sweep)
            fit_rows.append([theta, tau1, fit.A1, fit.n1, fit.A2, fit.n2, fit.lifetime_us,
                             "fallback" if fit.fallback else "ok"])
        except ValueError as exc:
            pk = analysis.stft_peak(mean, m, cfg.analysis.target_nu)
            curve = np.full(len(pk.n_sweep), np.nan)
            fit_rows.append([theta, tau1] + [float("nan")] * 5 + [f"not fitted: {exc}"])
        for n, p, q in zip(pk.n_sweep, pk.power, curve):
            stft_rows.append([theta, tau1, n, n * c["period"], p, q])
    paths = [pd / "fig2_stft.tsv", pd / "fig2_lifetime.tsv"]
    write_table(paths[0], [("theta", "rad"), ("tau1", "us"), ("n_sweep", "1"), ("t", "us"),
                           ("peak_power", "1"), ("fit_power", "1")], stft_rows)
    write_table(paths[1], [("theta", "rad"), ("tau1", "us"), ("A1", "1"), ("n1", "cycles"),
                           ("A2", "1"), ("n2", "cycles"), ("lifetime", "us"), ("status", "-")],
                fit_rows)
    return paths


def _fig3(out_dir, pd, cfg):
    fm = read_table(out_dir / "fractions_mean.tsv")
    rows = sorted(zip(fm["tau1"], fm["theta"], fm["f"], fm["delta_f"]))
    b = read_table(out_dir / "boundary.tsv")
    b_rows = [[t, "data", tm, tme, tp, tpe, s] for t, tm, tme, tp, tpe, s in zip(
        b["tau1"], b["theta_minus"], b["theta_minus_err"], b["theta_plus"],
        b["theta_plus_err"], b["status"])]
    if (out_dir / "meanfield_boundary.tsv").exists():
        mb = read_table(out_dir / "meanfield_boundary.tsv")
        b_rows += [[t, "meanfield", tm, float("nan"), tp, float("nan"), s] for t, tm, tp, s in zip(
            mb["tau1"], mb["theta_minus"], mb["theta_plus"], mb["status"])]
    paths = [pd / "fig3_fraction.tsv", pd / "fig3_boundary.tsv"]
    write_table(paths[0], [("tau1", "us"), ("theta", "rad"), ("f", "1"), ("delta_f", "1")], rows)
    write_table(paths[1], [("tau1", "us"), ("source", "-"), ("theta_minus", "rad"),
                           ("theta_minus_err", "rad"), ("theta_plus", "rad"),
                           ("theta_plus_err", "rad"), ("status", "-")], b_rows)
    return paths


def _fig4(out_dir, pd, cfg):
    cells = _cells(out_dir)
    if any(not c["pops"] for _, c in cells):
        raise MissingInputs(["Z3 population traces (protocol.variant: Z3)"])
    time_rows, freq_rows = [], []
    for (theta, tau1), c in cells:
        mean = c["P"].mean(axis=0)
        pops = np.mean(c["pops"], axis=0)
        for n in range(len(mean)):
            time_rows.append([theta, tau1, n, n * c["period"], pops[0, n], pops[1, n],
                              pops[2, n], mean[n]])
        freq_rows += _freq_rows(theta, tau1, mean, tuple(cfg.analysis.window))
    paths = [pd / "fig4_time.tsv", pd / "fig4_freq.tsv"]
    write_table(paths[0], [("theta", "rad"), ("tau1", "us"), ("n", "1"), ("t", "us"),
                           ("p_plus1", "1"), ("p_0", "1"), ("p_minus1", "1"), ("P", "1")],
                time_rows)
    write_table(paths[1], _FREQ_COLS, freq_rows)
    return paths
