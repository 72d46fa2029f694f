"""Report emission: atomic CSV/JSON writers with fixed numeric formatting,
and matplotlib figure rendering for the sweep outputs."""
from __future__ import annotations

import json
import os
import sys
import tempfile

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "stalab"

import matplotlib.pyplot as plt  # noqa: E402


def fmt(value) -> str:
    """12 significant digits for floats; everything else via str."""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".stalab-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str | None, header: list[str], rows) -> None:
    """RFC-4180-style CSV: one header row, LF endings, '.' decimals; path
    None prints to stdout."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def write_json(path: str | None, obj: dict) -> None:
    """Single JSON object, floats rounded to 12 significant digits; path None
    prints to stdout."""
    text = json.dumps(_round_floats(obj), indent=2, sort_keys=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def save_theta_opt_figure(path: str, omega_taus, theta_mins, sigma_rels) -> None:
    """Optimal angle and relative cost vs omega*tau (data points only)."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    ax1.semilogx(omega_taus, theta_mins, "o", ms=4, color="tab:blue")
    ax1.set_ylabel(r"$\theta_0^{\min}$")
    ax1.grid(True, which="both", ls="--", alpha=0.4)
    ax2.semilogx(omega_taus, sigma_rels, "o", ms=4, color="tab:red")
    ax2.set_xlabel(r"$\omega\tau$")
    ax2.set_ylabel(r"$\Sigma_{\rm rel}$")
    ax2.grid(True, which="both", ls="--", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def save_scaling_figure(path: str, fits) -> None:
    """Log-log energetic cost vs list size, one line per (model, norm)."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for fit in fits:
        ax.loglog(fit.Ns, fit.sigmas, "o-", ms=4,
                  label=f"{fit.model} ({fit.norm_kind}), slope {fit.slope:.2f}")
    ax.set_xlabel("N")
    ax.set_ylabel(r"energetic cost $\Sigma$")
    ax.grid(True, which="both", ls="--", alpha=0.4)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def save_trace_figure(path: str, trace, ylabel: str = "ground-space fidelity") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ss = [p[0] for p in trace]
    vals = [p[1] for p in trace]
    ax.plot(ss, vals, "-", lw=1.2)
    ax.set_xlabel("s")
    ax.set_ylabel(ylabel)
    ax.grid(True, ls="--", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
