"""Figure rendering for exported result CSVs.

Every plot function takes a CSV produced by :mod:`pfbo.bench` and
writes a PNG next to it; ``render_report`` does the whole directory.
Uses the Agg backend so it works headless.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "plot_loglik_stats",
    "plot_mse_curves",
    "plot_posterior_snapshots",
    "plot_convergence_increments",
    "render_report",
]

_DPI = 150


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:] if line]


def _cell_label(sigma_n: str, length_scale: str) -> str:
    return rf"$\sigma_n$={sigma_n}, $\ell$={length_scale}"


def plot_loglik_stats(table1_path: str | Path, out_path: str | Path) -> Path:
    """Estimator mean +/- sd per theta probe, with the exact curve."""
    table1_path, out_path = Path(table1_path), Path(out_path)
    header, rows = _read_rows(table1_path)
    probes = [float(p) for p in header[2:]]
    by_m: dict[str, dict[str, list[float]]] = defaultdict(dict)
    kalman = None
    for row in rows:
        values = [float(v) for v in row[2:]]
        if row[0] == "kalman":
            kalman = values
        else:
            by_m[row[0]][row[1]] = values
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    if kalman is not None:
        ax.plot(probes, kalman, "k-", lw=2, label="exact (Kalman)")
    for m, stats in by_m.items():
        ax.errorbar(probes, stats["mean"], yerr=stats["sd"], marker="o",
                    capsize=3, ls="--", label=f"PF, m={m}")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("log-likelihood")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def plot_mse_curves(mse_path: str | Path, out_path: str | Path) -> Path:
    """log10 MSE of incumbent location / value vs. iteration, per cell."""
    mse_path, out_path = Path(mse_path), Path(out_path)
    _, rows = _read_rows(mse_path)
    # key -> iter -> (log10 mse_x, log10 mse_f)
    curves: dict[tuple[str, str, str], dict[int, tuple[float, float]]] = defaultdict(dict)
    for m, sn, ls, it, _, lx, _, lf in rows:
        curves[(m, sn, ls)][int(it)] = (float(lx), float(lf))
    m_values = sorted({k[0] for k in curves}, key=int)
    fig, axes = plt.subplots(len(m_values), 2, squeeze=False,
                             figsize=(10, 3.2 * len(m_values)), sharex=True)
    for mi, m in enumerate(m_values):
        for col, (name, idx) in enumerate((("MSE(x)", 0), (r"MSE($\ell$)", 1))):
            ax = axes[mi][col]
            for (cm, sn, ls), per_iter in sorted(curves.items()):
                if cm != m:
                    continue
                its = sorted(per_iter)
                ax.plot(its, [per_iter[i][idx] for i in its],
                        label=_cell_label(sn, ls))
            ax.set_title(f"m={m}")
            ax.set_ylabel(rf"$\log_{{10}}$ {name}")
            if mi == len(m_values) - 1:
                ax.set_xlabel("iteration")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def plot_posterior_snapshots(snap_path: str | Path, out_path: str | Path) -> Path:
    """Surrogate mean with +/- kappa*sd band at the recorded iterations.

    Shows the first recorded cell/seed combination; one panel per
    snapshot iteration.
    """
    snap_path, out_path = Path(snap_path), Path(out_path)
    _, rows = _read_rows(snap_path)
    if not rows:
        raise ValueError(f"{snap_path}: no snapshot rows")
    first_key = tuple(rows[0][:4])
    per_iter: dict[int, list[tuple[float, float, float, float]]] = defaultdict(list)
    for row in rows:
        if tuple(row[:4]) != first_key:
            continue
        it = int(row[4])
        theta, mu = float(row[7]), float(row[8])
        lower, upper = float(row[10]), float(row[11])
        per_iter[it].append((theta, mu, lower, upper))
    iters = sorted(per_iter)
    fig, axes = plt.subplots(1, len(iters), figsize=(3.0 * len(iters), 3.2),
                             squeeze=False, sharey=True)
    for ax, it in zip(axes[0], iters):
        pts = per_iter[it]
        theta = [p[0] for p in pts]
        ax.plot(theta, [p[1] for p in pts], "b-", lw=1.5)
        ax.fill_between(theta, [p[2] for p in pts], [p[3] for p in pts],
                        alpha=0.25, color="b")
        ax.set_title(f"iter {it}")
        ax.set_xlabel(r"$\theta$")
    axes[0][0].set_ylabel("standardized log-likelihood")
    m, sn, ls, _ = first_key
    fig.suptitle(f"m={m}, " + _cell_label(sn, ls), fontsize=10)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def plot_convergence_increments(
    conv_path: str | Path,
    out_path: str | Path,
    eps_x: float = 0.01,
    eps_f: float = 0.1,
) -> Path:
    """Median per-iteration incumbent increments, with the stop thresholds."""
    conv_path, out_path = Path(conv_path), Path(out_path)
    _, rows = _read_rows(conv_path)
    # (m, sn, ls) -> t -> list of (dx, dmean) over seeds
    groups: dict[tuple[str, str, str], dict[int, list[tuple[float, float]]]] = \
        defaultdict(lambda: defaultdict(list))
    for m, sn, ls, _, t, dx, dm in rows:
        groups[(m, sn, ls)][int(t)].append((float(dx), float(dm)))
    m_values = sorted({k[0] for k in groups}, key=int)
    fig, axes = plt.subplots(len(m_values), 2, squeeze=False,
                             figsize=(10, 3.2 * len(m_values)), sharex=True)
    eps = (eps_x, eps_f)
    names = (r"median $|\Delta x|$ (normalized)", r"median $|\Delta \mu|$")
    floor = 1e-12  # keep zero increments visible on the log axis
    for mi, m in enumerate(m_values):
        for col in (0, 1):
            ax = axes[mi][col]
            for (cm, sn, ls), per_t in sorted(groups.items()):
                if cm != m:
                    continue
                ts = sorted(per_t)
                med = [sorted(v[col] for v in per_t[t])[len(per_t[t]) // 2] for t in ts]
                ax.plot(ts, [max(v, floor) for v in med], label=_cell_label(sn, ls))
            ax.axhline(eps[col], color="k", ls=":", lw=1)
            ax.set_yscale("log")
            ax.set_title(f"m={m}")
            ax.set_ylabel(names[col])
            if mi == len(m_values) - 1:
                ax.set_xlabel("iteration")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def render_report(results_dir: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Render every figure whose source CSV exists and has data rows.

    Figures land next to the CSVs unless ``out_dir`` says otherwise.
    Returns the written paths.
    """
    results_dir = Path(results_dir)
    out = Path(out_dir) if out_dir is not None else results_dir
    out.mkdir(parents=True, exist_ok=True)
    jobs = (
        ("table1.csv", "loglik_stats.png", plot_loglik_stats),
        ("mse_curves.csv", "mse_curves.png", plot_mse_curves),
        ("posterior_snapshots.csv", "posterior_snapshots.png", plot_posterior_snapshots),
        ("convergence_increments.csv", "convergence_increments.png",
         plot_convergence_increments),
    )
    written = []
    for src_name, fig_name, fn in jobs:
        src = results_dir / src_name
        if not src.exists():
            continue
        lines = src.read_text(encoding="utf-8").splitlines()
        if len(lines) < 2:
            continue
        written.append(fn(src, out / fig_name))
    return written
