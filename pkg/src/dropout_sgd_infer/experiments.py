"""Experiment harness behind the dropout-sgd-infer command-line tool.

Four subcommands write CSV files: `contraction` sweeps learning rates
around the stability bound on a fresh Gaussian design, `coverage` runs
replicated SGD chains and tallies confidence-interval coverage at
checkpoints, `traces` records averaged-iterate convergence paths for a
fixed-design and a streaming run, and `cov-convergence` tracks the
long-run variance estimates, the projection-CI length, and the
estimator's error on an i.i.d. oracle input of known covariance.

Replicated runs go through a vectorized engine that advances all
replications in lockstep.  Each replication owns one counter-based RNG
stream and draws in fixed-size blocks (design row block, noise block,
mask block), so a plain per-replication loop through the library types
consumes the identical random numbers; results merge in
replication-index order no matter how replications are grouped across
worker threads.
"""

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .gd_dropout import GdProblem, GdState, empirical_contraction_sq, gd_step, lr_bound_gd
from .inference import coverage_tally, inv_norm_cdf
from .longrun_cov import BlockSchedule, CovState
from .randgen import (
    DropoutMask,
    RngStream,
    StreamSample,
    gen_fixed_design,
    sample_dropout,
    stream_sample,
)
from .sgd_dropout import AsgdState, SgdConfig, SgdState, lr_admissible_q2, sgd_step

_CHUNK = 1024
_CONTRACTION_DRAWS = 500
_CONTRACTION_FACTORS = (0.99, 1.02)
_ADMISSIBILITY_DRAWS = 10000
_TRACE_POINTS = 1000
_AGD_DESIGN_ROWS = 100
_AGD_DESIGN_TRIES = 32
_DEFAULT_SEED = 20240801
_DEFAULT_CHECKPOINT_OFFSETS = (100000, 50000, 20000, 10000, 0)

# stream-id layout: 0 = designs and shared draws, 1..R = replications,
# 2^32 + r = oracle replications, 2^33 = admissibility probe
_ORACLE_STREAM_BASE = 2 ** 32
_ADMISSIBILITY_STREAM = 2 ** 33


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 10
    p: float = 0.9
    alpha: tuple = (0.01,)
    n: int = 100000
    runs: int = 200
    c: float = 1.0
    zeta: float = 1.5
    omega: float = 0.05
    seed: int = _DEFAULT_SEED
    checkpoints: tuple = None
    out_dir: str = "out"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be at least 1, got {self.d}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        alphas = tuple(float(a) for a in self.alpha)
        if any(a <= 0.0 for a in alphas):
            raise ValueError("all alpha values must be positive")
        object.__setattr__(self, "alpha", alphas)
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if self.runs < 1:
            raise ValueError(f"runs must be at least 1, got {self.runs}")
        if not 0.0 < self.omega < 1.0:
            raise ValueError(f"omega must lie in (0, 1), got {self.omega}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.checkpoints is not None:
            cks = tuple(int(k) for k in self.checkpoints)
            if list(cks) != sorted(set(cks)):
                raise ValueError("checkpoints must be strictly ascending")
            if cks[0] < 1 or cks[-1] > self.n:
                raise ValueError("checkpoints must lie in [1, n]")
            object.__setattr__(self, "checkpoints", cks)


def default_checkpoints(n):
    """Checkpoint grid at fixed offsets below n, clipped at 1."""
    return tuple(sorted({max(1, n - off) for off in _DEFAULT_CHECKPOINT_OFFSETS}))


def resolved_checkpoints(config):
    if config.checkpoints is not None:
        return list(config.checkpoints)
    return list(default_checkpoints(config.n))


def apply_scale(config, scale):
    """Divide n (and any explicit checkpoints) by scale for smoke runs."""
    if scale < 1:
        raise ValueError(f"scale must be at least 1, got {scale}")
    if scale == 1:
        return config
    cks = config.checkpoints
    if cks is not None:
        cks = tuple(sorted({max(1, k // scale) for k in cks}))
    return replace(config, n=max(1, config.n // scale), checkpoints=cks)


def beta_star_equidistant(d):
    """True parameter used throughout: coordinates evenly spaced in [0, 1]."""
    if d == 1:
        return np.array([1.0])
    return np.linspace(0.0, 1.0, d)


def _chunk_sizes(total):
    sizes = []
    rem = int(total)
    while rem > 0:
        b = min(_CHUNK, rem)
        sizes.append(b)
        rem -= b
    return sizes


class ReplicationEngine:
    """Lockstep SGD chains plus streaming covariance across replications.

    State per replication: iterate, running mean, open-block sum, and
    closed-block accumulators.  The block schedule depends only on the
    step count, so branch decisions are shared.  Closed-block totals are
    folded only when a block closes; the full accumulators of the
    streaming estimator are materialized on demand as
    V = V_closed + tail^2, K = K_closed + delta^2, H = H_closed + delta*tail.
    """

    def __init__(self, d, p, alpha, beta_star, schedule, streams, oracle=False):
        self.d = d
        self.p = p
        self.alpha = alpha
        self.beta_star = np.asarray(beta_star, dtype=float)
        self.schedule = schedule
        self.streams = list(streams)
        self.oracle = oracle
        r = len(self.streams)
        self.beta = np.zeros((r, d))
        self.mean = np.zeros((r, d))
        self.vblocks = np.zeros((r, d, d))
        self.hblocks = np.zeros((r, d))
        self.rtail = np.zeros((r, d))
        self.kblocks = 0.0
        self.delta = 0
        self.psi = 0
        self.n = 0

    def advance(self, steps):
        if steps < 0:
            raise ValueError("cannot advance by a negative step count")
        eta = self.schedule.eta
        p = self.p
        alpha = self.alpha
        beta_star = self.beta_star
        beta = self.beta
        mean = self.mean
        rtail = self.rtail
        n = self.n
        delta = self.delta
        psi = self.psi
        for b in _chunk_sizes(steps):
            if self.oracle:
                zs = np.stack([s.normal(size=(b, self.d)) for s in self.streams])
            else:
                xs = np.stack([s.normal(size=(b, self.d)) for s in self.streams])
                eps = np.stack([s.normal(size=b) for s in self.streams])
                us = np.stack([s.uniform(size=(b, self.d)) for s in self.streams])
            for t in range(b):
                if self.oracle:
                    iterate = zs[:, t, :]
                else:
                    x = xs[:, t, :]
                    xd = x * (us[:, t, :] < p)
                    resid = x @ beta_star + eps[:, t] - (xd * beta).sum(axis=1)
                    beta = beta + alpha * resid[:, None] * xd
                    iterate = beta
                n_new = n + 1
                mean = (n * mean + iterate) / n_new
                if n_new < eta(psi + 1):
                    rtail = rtail + iterate
                    delta += 1
                else:
                    if delta > 0:
                        self.vblocks += rtail[:, :, None] * rtail[:, None, :]
                        self.kblocks += float(delta * delta)
                        self.hblocks += delta * rtail
                    psi += 1
                    rtail = iterate.copy()
                    delta = 1
                n = n_new
        self.beta = beta
        self.mean = mean
        self.rtail = rtail
        self.n = n
        self.delta = delta
        self.psi = psi

    def sigma_hat(self):
        """Per-replication covariance estimates, shape (runs, d, d)."""
        if self.n < 1:
            raise ValueError("cannot finalize before the first update")
        v = self.vblocks + self.rtail[:, :, None] * self.rtail[:, None, :]
        k = self.kblocks + float(self.delta * self.delta)
        h = self.hblocks + self.delta * self.rtail
        m = self.mean
        sig = (
            v
            + k * (m[:, :, None] * m[:, None, :])
            - h[:, :, None] * m[:, None, :]
            - m[:, :, None] * h[:, None, :]
        ) / self.n
        return 0.5 * (sig + sig.transpose(0, 2, 1))


def reference_run(d, p, alpha, beta_star, schedule, stream, segments, oracle=False):
    """One replication through the library types, drawing chunk-for-chunk
    like the engine; returns (final state, cov state, per-segment
    (mean, sigma) snapshots)."""
    config = SgdConfig(d=d, p=p, alpha=alpha, beta_star=np.asarray(beta_star, dtype=float))
    state = SgdState(beta=np.zeros(d), step=0)
    cov = CovState(d, schedule)
    snaps = []
    for seg in segments:
        for b in _chunk_sizes(seg):
            if oracle:
                zs = stream.normal(size=(b, d))
                for t in range(b):
                    cov.update(zs[t])
            else:
                xs = stream.normal(size=(b, d))
                eps = stream.normal(size=b)
                us = stream.uniform(size=(b, d))
                for t in range(b):
                    sample = StreamSample(y_k=float(xs[t] @ config.beta_star + eps[t]), x_k=xs[t])
                    mask = DropoutMask(retained=(us[t] < p).astype(np.int64), p=p)
                    state = sgd_step(config, state, sample, mask)
                    cov.update(state.beta)
        snaps.append((cov.mean.mean.copy(), cov.finalize()))
    return state, cov, snaps


def _worker_slices(total, workers):
    per = math.ceil(total / workers)
    return [(lo, min(lo + per, total)) for lo in range(0, total, per)]


def _run_groups(make_engine, stream_ids, checkpoints, collect, workers):
    """Advance one engine per contiguous replication group, pausing at each
    checkpoint to collect per-replication statistics; results are stitched
    back in replication-index order."""
    segments = np.diff([0] + list(checkpoints))

    def run_group(bounds):
        lo, hi = bounds
        engine = make_engine(stream_ids[lo:hi])
        rows = []
        for ck, seg in zip(checkpoints, segments):
            engine.advance(int(seg))
            rows.append(collect(engine, ck))
        return rows

    slices = _worker_slices(len(stream_ids), max(1, workers))
    if len(slices) == 1:
        group_rows = [run_group(slices[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(slices)) as pool:
            group_rows = list(pool.map(run_group, slices))
    merged = []
    for ck_idx in range(len(checkpoints)):
        parts = [rows[ck_idx] for rows in group_rows]
        merged.append(np.concatenate(parts, axis=0))
    return merged


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"
    return str(value)


def _write_csv(path, header, rows):
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from exc
    return path


def _single_alpha(config, command):
    if len(config.alpha) != 1:
        raise ValueError(f"{command} takes exactly one alpha, got {list(config.alpha)}")
    return config.alpha[0]


def cmd_contraction_table(config):
    """Learning rates around the stability bound on a fresh Gaussian design.

    Emits one row per rate: the two bracketing factors 0.99 and 1.02 of
    the bound always, then any explicitly configured rates.
    """
    stream = RngStream(config.seed, stream_id=0)
    x = stream.normal(size=(config.n, config.d))
    gram = x.T @ x
    bound = lr_bound_gd(gram)
    rates = [f * bound for f in _CONTRACTION_FACTORS] + list(config.alpha)
    rows = []
    for rate in rates:
        r2 = empirical_contraction_sq(gram, config.p, rate, _CONTRACTION_DRAWS, stream)
        rows.append((config.n, config.d, config.p, rate, bound, r2))
    path = os.path.join(config.out_dir, "contraction.csv")
    return _write_csv(path, ("n", "d", "p", "alpha", "bound", "r2_hat"), rows)


def check_admissibility(config, alpha):
    """Second-moment admissibility probe on a dedicated stream."""
    stream = RngStream(config.seed, stream_id=_ADMISSIBILITY_STREAM)
    draws = stream.normal(size=(_ADMISSIBILITY_DRAWS, config.d))
    sgd_config = SgdConfig(d=config.d, p=config.p, alpha=alpha,
                           beta_star=beta_star_equidistant(config.d))
    return lr_admissible_q2(sgd_config, draws)


def run_coverage_cell(config, workers=1):
    """Replicated coverage rates at each checkpoint.

    Returns a list of dicts with keys checkpoint_n, coordinate rate/se,
    projection rate/se.  Coverage targets the true parameter: the design
    is isotropic, so the streaming minimizer coincides with it.
    """
    alpha = _single_alpha(config, "coverage")
    beta_star = beta_star_equidistant(config.d)
    checkpoints = resolved_checkpoints(config)
    z = inv_norm_cdf(1.0 - config.omega / 2.0)
    v = np.ones(config.d) / math.sqrt(config.d)
    proj_target = float(v @ beta_star)

    def make_engine(ids):
        streams = [RngStream(config.seed, stream_id=i) for i in ids]
        return ReplicationEngine(config.d, config.p, alpha, beta_star,
                                 BlockSchedule(config.c, config.zeta), streams)

    def collect(engine, ck):
        sig = engine.sigma_hat()
        diag = np.clip(np.diagonal(sig, axis1=1, axis2=2), 0.0, None)
        half = z * np.sqrt(diag / ck)
        coord_hits = np.abs(engine.mean - beta_star[None, :]) <= half
        pvar = np.clip(np.einsum("rij,i,j->r", sig, v, v), 0.0, None)
        proj_half = z * np.sqrt(pvar / ck)
        proj_hits = np.abs(engine.mean @ v - proj_target) <= proj_half
        return np.concatenate([coord_hits, proj_hits[:, None]], axis=1)

    stream_ids = list(range(1, config.runs + 1))
    merged = _run_groups(make_engine, stream_ids, checkpoints, collect, workers)
    results = []
    for ck, hits in zip(checkpoints, merged):
        coord = hits[:, : config.d]
        proj = hits[:, config.d].astype(bool)
        coord_rate = float(coord.mean())
        coord_se = math.sqrt(coord_rate * (1.0 - coord_rate) / config.runs)
        proj_rate, proj_se = coverage_tally(list(proj))
        results.append({
            "checkpoint_n": ck,
            "coordinate": (coord_rate, coord_se),
            "projection": (proj_rate, proj_se),
        })
    return results


def cmd_coverage(config, workers=1):
    """Coverage table: coordinate CIs averaged over coordinates, and the
    projection CI along the all-ones unit direction."""
    alpha = _single_alpha(config, "coverage")
    rows = []
    _, admissible = check_admissibility(config, alpha)
    if not admissible:
        print(f"warning: alpha={alpha:g} fails the second-moment admissibility "
              "check; coverage may be off", file=sys.stderr)
        rows.append((0, "warning_inadmissible_alpha", math.nan, math.nan))
    for entry in run_coverage_cell(config, workers=workers):
        ck = entry["checkpoint_n"]
        rows.append((ck, "coordinate", *entry["coordinate"]))
        rows.append((ck, "projection", *entry["projection"]))
    path = os.path.join(config.out_dir, "coverage.csv")
    return _write_csv(path, ("checkpoint_n", "mode", "coverage", "se"), rows)


def _trace_ticks(n):
    stride = max(1, n // _TRACE_POINTS)
    ticks = set(range(stride, n + 1, stride))
    ticks.update((1, n))
    return sorted(ticks)


def _agd_trace(config, alpha, beta_star, ticks):
    design_stream = RngStream(config.seed, stream_id=0)
    problem = None
    for _ in range(_AGD_DESIGN_TRIES):
        rows = max(_AGD_DESIGN_ROWS, config.d)
        data = gen_fixed_design(rows, config.d, beta_star, design_stream)
        candidate = GdProblem(data.X, data.y, config.p, alpha)
        if candidate.admissible:
            problem = candidate
            break
    if problem is None:
        raise RuntimeError(
            f"no admissible fixed design found in {_AGD_DESIGN_TRIES} tries; "
            "lower alpha")
    mask_stream = RngStream(config.seed, stream_id=1)
    state = GdState(beta=np.zeros(config.d), step=0)
    mean = AsgdState(config.d)
    out = {}
    tick_set = set(ticks)
    for k in range(1, config.n + 1):
        mask = sample_dropout(config.d, config.p, mask_stream)
        state = gd_step(problem, state, mask)
        mean.update(state.beta)
        if k in tick_set:
            out[k] = mean.mean.copy()
    return out


def _asgd_trace(config, alpha, beta_star, ticks):
    stream = RngStream(config.seed, stream_id=2)
    sgd_config = SgdConfig(d=config.d, p=config.p, alpha=alpha, beta_star=beta_star)
    state = SgdState(beta=np.zeros(config.d), step=0)
    mean = AsgdState(config.d)
    out = {}
    tick_set = set(ticks)
    for k in range(1, config.n + 1):
        sample = stream_sample(beta_star, stream)
        mask = sample_dropout(config.d, config.p, stream)
        state = sgd_step(sgd_config, state, sample, mask)
        mean.update(state.beta)
        if k in tick_set:
            out[k] = mean.mean.copy()
    return out


def cmd_traces(config):
    """Averaged-iterate convergence paths: one fixed-design run and one
    streaming run, every coordinate, decimated to ~1000 points."""
    alpha = _single_alpha(config, "traces")
    beta_star = beta_star_equidistant(config.d)
    ticks = _trace_ticks(config.n)
    traces = {"agd": _agd_trace(config, alpha, beta_star, ticks),
              "asgd": _asgd_trace(config, alpha, beta_star, ticks)}
    rows = []
    for algo in ("agd", "asgd"):
        for k in ticks:
            values = traces[algo][k]
            for j in range(config.d):
                rows.append((k, algo, j + 1, values[j]))
    path = os.path.join(config.out_dir, "traces.csv")
    return _write_csv(path, ("k", "algo", "coord", "value"), rows)


def oracle_error_medians(d, runs, checkpoints, seed, c, zeta, workers=1):
    """Feed i.i.d. standard normal vectors (long-run covariance I) through
    the streaming estimator; median operator-norm error per checkpoint."""
    schedule_args = (c, zeta)

    def make_engine(ids):
        streams = [RngStream(seed, stream_id=i) for i in ids]
        return ReplicationEngine(d, 1.0, 1.0, np.zeros(d),
                                 BlockSchedule(*schedule_args), streams, oracle=True)

    eye = np.eye(d)

    def collect(engine, ck):
        sig = engine.sigma_hat()
        return np.array([linalg.operator_norm(s - eye) for s in sig])

    stream_ids = [_ORACLE_STREAM_BASE + r for r in range(runs)]
    merged = _run_groups(make_engine, stream_ids, checkpoints, collect, workers)
    return [float(np.median(errs)) for errs in merged]


def cmd_cov_convergence(config, workers=1):
    """Variance and CI-length trajectories of one SGD run, plus the oracle
    error curve of the estimator on i.i.d. input."""
    alpha = _single_alpha(config, "cov-convergence")
    beta_star = beta_star_equidistant(config.d)
    checkpoints = resolved_checkpoints(config)
    z = inv_norm_cdf(1.0 - config.omega / 2.0)
    v = np.ones(config.d) / math.sqrt(config.d)

    def make_engine(ids):
        streams = [RngStream(config.seed, stream_id=i) for i in ids]
        return ReplicationEngine(config.d, config.p, alpha, beta_star,
                                 BlockSchedule(config.c, config.zeta), streams)

    def collect(engine, ck):
        sig = engine.sigma_hat()[0]
        diag = np.diag(sig).copy()
        pvar = max(float(v @ sig @ v), 0.0)
        length = 2.0 * z * math.sqrt(pvar / ck)
        return np.concatenate([diag, [length]])[None, :]

    merged = _run_groups(make_engine, [1], checkpoints, collect, workers=1)
    rows = []
    for ck, stats in zip(checkpoints, merged):
        for j in range(config.d):
            rows.append((ck, f"var_{j + 1}", stats[0, j]))
        rows.append((ck, "ci_length", stats[0, config.d]))
    medians = oracle_error_medians(config.d, config.runs, checkpoints,
                                   config.seed, config.c, config.zeta,
                                   workers=workers)
    for ck, med in zip(checkpoints, medians):
        rows.append((ck, "oracle_err", med))
    path = os.path.join(config.out_dir, "cov_convergence.csv")
    return _write_csv(path, ("checkpoint_n", "series", "value"), rows)


_FLAG_KEYS = ("d", "p", "alpha", "n", "runs", "c", "zeta", "omega", "seed",
              "scale", "out")

_SUBCOMMAND_DEFAULTS = {
    "contraction": dict(d=5, p=0.9, alpha="", n=100, runs=1, c=1.0, zeta=1.5,
                        omega=0.05, seed=_DEFAULT_SEED, scale=1, out="out"),
    "coverage": dict(d=3, p=0.9, alpha="0.01", n=200000, runs=200, c=1.0,
                     zeta=1.5, omega=0.05, seed=_DEFAULT_SEED, scale=1, out="out"),
    "traces": dict(d=10, p=0.9, alpha="0.01", n=100000, runs=1, c=1.0,
                   zeta=2.0, omega=0.05, seed=_DEFAULT_SEED, scale=1, out="out"),
    "cov-convergence": dict(d=10, p=0.9, alpha="0.01", n=100000, runs=50,
                            c=1.0, zeta=2.0, omega=0.05, seed=_DEFAULT_SEED,
                            scale=1, out="out"),
}

_KEY_PARSERS = {
    "d": int, "n": int, "runs": int, "seed": int, "scale": int,
    "p": float, "c": float, "zeta": float, "omega": float,
    "alpha": str, "out": str,
}


def _parse_alpha(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(float(part) for part in text.split(","))


def _read_config_file(path):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise RuntimeError(f"cannot read {path}: {exc}") from exc
    for idx, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{idx}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FLAG_KEYS:
            raise ValueError(f"{path}:{idx}: unknown key {key!r}")
        values[key] = _KEY_PARSERS[key](value.strip())
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dropout-sgd-infer",
        description="Dropout GD/SGD experiments: contraction boundary, CI "
                    "coverage, convergence traces, covariance trajectories.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "contraction": "learning-rate sweep around the stability bound",
        "coverage": "replicated confidence-interval coverage at checkpoints",
        "traces": "averaged-iterate convergence paths (fixed design and streaming)",
        "cov-convergence": "long-run variance, CI length, and oracle error curves",
    }
    for name in _SUBCOMMAND_DEFAULTS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--d", type=int, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--alpha", type=str, default=None,
                        help="comma-separated learning rates")
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--runs", type=int, default=None)
        sp.add_argument("--c", type=float, default=None)
        sp.add_argument("--zeta", type=float, default=None)
        sp.add_argument("--omega", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--scale", type=int, default=None,
                        help="divide n and checkpoints for smoke runs")
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--config", type=str, default=None,
                        help="key=value file; explicit flags override it")
    return parser


def _resolve(args):
    defaults = _SUBCOMMAND_DEFAULTS[args.command]
    file_values = _read_config_file(args.config) if args.config else {}
    resolved = {}
    for key in _FLAG_KEYS:
        flag = getattr(args, key)
        if flag is not None:
            resolved[key] = flag
        elif key in file_values:
            resolved[key] = file_values[key]
        else:
            resolved[key] = defaults[key]
    alphas = resolved["alpha"]
    if isinstance(alphas, str):
        alphas = _parse_alpha(alphas)
    config = ExperimentConfig(
        d=resolved["d"], p=resolved["p"], alpha=alphas, n=resolved["n"],
        runs=resolved["runs"], c=resolved["c"], zeta=resolved["zeta"],
        omega=resolved["omega"], seed=resolved["seed"], out_dir=resolved["out"])
    return apply_scale(config, resolved["scale"])


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve(args)
        if args.command == "contraction":
            path = cmd_contraction_table(config)
        elif args.command == "coverage":
            path = cmd_coverage(config)
        elif args.command == "traces":
            path = cmd_traces(config)
        else:
            path = cmd_cov_convergence(config)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
