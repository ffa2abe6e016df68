"""Figure rendering for the experiment runner.

One figure per experiment, written next to the CSV.  Rendering is headless
(Agg) and byte-deterministic: the PNG writer's software tag is suppressed
so reruns of the same config produce identical files.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 130, "metadata": {"Software": None}, "bbox_inches": "tight"}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def control_length_curve(rows, path: Path) -> Path:
    eps = [r[0] for r in rows]
    ell = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(eps, ell)
    ax.set_xlabel(r"noise $\epsilon$")
    ax.set_ylabel(r"control length $\ell_c$")
    ax.set_yscale("log")
    return _save(fig, path)


def capacity_curves(rows, path: Path) -> Path:
    by_eps = defaultdict(list)
    for eps, m, _, c in rows:
        by_eps[eps].append((m, c))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for eps in sorted(by_eps):
        pts = sorted(by_eps[eps])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"eps={eps:g}")
    ax.set_xlabel("channel length m")
    ax.set_ylabel("capacity [bits]")
    ax.legend()
    return _save(fig, path)


def density_traces(rows, path: Path) -> Path:
    by_eps = defaultdict(list)
    for row in rows:
        by_eps[row[0]].append(row)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for eps in sorted(by_eps):
        data = sorted(by_eps[eps], key=lambda r: r[1])
        t = [r[1] for r in data]
        ax.plot(t, [r[2] for r in data], label=f"eps={eps:g}")
        if data[0][3] != "":
            ax.plot(t, [r[3] for r in data], linestyle="--", color="black", linewidth=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("mean density of ones")
    ax.legend()
    return _save(fig, path)


def spacetime_raster(dense: np.ndarray, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(dense, cmap="binary", interpolation="nearest", aspect="auto")
    ax.set_xlabel("agent")
    ax.set_ylabel("t")
    return _save(fig, path)


def multi_info_scan(rows, path: Path) -> Path:
    agents = [r[0] for r in rows]
    values = [r[4] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.stem(agents, values)
    ax.set_xlabel("agent i")
    ax.set_ylabel("delayed multi-information [bits]")
    return _save(fig, path)


def influence_vs_multi_info(rows, path: Path) -> Path:
    degree = np.array([r[1] for r in rows], dtype=float)
    influence = [r[2] for r in rows]
    multi = [r[3] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    sizes = 20 + 15 * degree
    ax.scatter(multi, influence, s=sizes, alpha=0.7, edgecolor="black", linewidth=0.4)
    ax.set_xlabel("delayed multi-information [bits]")
    ax.set_ylabel("influence (density shift)")
    return _save(fig, path)


def mi_profiles(rows, path: Path) -> Path:
    taus = sorted({r[3] for r in rows})
    fig, axes = plt.subplots(1, len(taus), figsize=(4 * len(taus), 3.2), squeeze=False)
    for ax, tau in zip(axes[0], taus):
        by_agent = defaultdict(list)
        for i, j, _, row_tau, value, _ in rows:
            if row_tau == tau:
                by_agent[i].append((j, value))
        for agent in sorted(by_agent):
            pts = sorted(by_agent[agent])
            ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"i={agent}")
        ax.set_title(f"tau={tau}")
        ax.set_xlabel("agent j")
        ax.set_ylabel("w [bits]")
    axes[0][0].legend(fontsize=7)
    return _save(fig, path)


def lambda_vs_inverse_length(rows, slope, intercept, path: Path) -> Path:
    x = np.array([r[1] for r in rows])
    y = np.array([r[2] for r in rows])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.scatter(x, y)
    grid = np.linspace(0, x.max() * 1.05, 50)
    ax.plot(grid, slope * grid + intercept, linestyle="--")
    ax.set_xlabel(r"$1/\ell_c$")
    ax.set_ylabel(r"fitted decay rate $\lambda$")
    return _save(fig, path)


def strategy_curves(rows, path: Path) -> Path:
    by_eps = defaultdict(list)
    for row in rows:
        by_eps[row[0]].append(row)
    fig, axes = plt.subplots(1, len(by_eps), figsize=(4 * len(by_eps), 3.2), squeeze=False)
    for ax, eps in zip(axes[0], sorted(by_eps)):
        data = sorted(by_eps[eps], key=lambda r: r[2])
        t = [r[2] for r in data]
        ax.plot(t, [r[3] for r in data], label="single")
        ax.plot(t, [r[4] for r in data], label="spaced")
        ax.set_title(f"eps={eps:g}, d={data[0][1]}")
        ax.set_xlabel("t")
        ax.set_ylabel("free-agent density")
        ax.set_ylim(0.0, 1.05)
    axes[0][0].legend(fontsize=8)
    return _save(fig, path)


def energy_bounds(rows, path: Path) -> Path:
    by_eps = defaultdict(list)
    for row in rows:
        by_eps[row[1]].append(row)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for eps in sorted(by_eps):
        data = sorted(by_eps[eps])
        n = [r[0] for r in data]
        ax.plot(n, [r[2] for r in data], marker="o", label=f"energy eps={eps:g}")
        ax.plot(n, [r[3] for r in data], linestyle=":", color="gray")
        ax.plot(n, [r[4] for r in data], linestyle="--", color="gray")
    ax.set_yscale("log")
    ax.set_xlabel("free agents n")
    ax.set_ylabel("observation energy")
    ax.legend(fontsize=7)
    return _save(fig, path)
