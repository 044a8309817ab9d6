"""Figure rendering for the report path; headless, files only.

The report command sweeps the analytic error expressions over the phase
grid size and signal power and drops PNG figures next to the delimited
output, so a run leaves both the machine-readable curves and something a
person can look at.
"""

from __future__ import annotations

import dataclasses
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from . import analytics  # noqa: E402
from .adversary import PskConstellation, srm_error_psk  # noqa: E402
from .analytics import SystemParams  # noqa: E402

_DPI = 150


def _at(p: SystemParams, **overrides) -> SystemParams:
    return dataclasses.replace(p, **overrides)


def report_rows(p: SystemParams, j_values, alpha_sq_values) -> list:
    """Analytic curves on the (J, alpha_sq) grid, one row per point.

    Rows are ordered lexicographically by (J, alpha_sq).
    """
    rows = []
    for j in sorted(j_values):
        for a2 in sorted(alpha_sq_values):
            q = _at(p, j_phases=int(j), alpha_sq=float(a2))
            rows.append(
                {
                    "M": q.m_modes,
                    "J": q.j_phases,
                    "alpha_sq": q.alpha_sq,
                    "bob_analytic_paper": analytics.bob_error_paper(q),
                    "bob_analytic_exact": analytics.bob_error_exact_argmin(q),
                    "eve_analytic_paper": analytics.eve_error_heterodyne(q, "paper"),
                    "eve_analytic_chord": analytics.eve_error_heterodyne(q, "chord"),
                    "srm_error": srm_error_psk(
                        PskConstellation(q.alpha_mag, q.j_phases), q.m_modes
                    ),
                    "masking_ratio": analytics.masking_ratio(q),
                }
            )
    return rows


def rows_to_csv(rows: list) -> str:
    cols = [
        "M",
        "J",
        "alpha_sq",
        "bob_analytic_paper",
        "bob_analytic_exact",
        "eve_analytic_paper",
        "eve_analytic_chord",
        "srm_error",
        "masking_ratio",
    ]
    lines = ["# schema=qnsc-report-v1", ",".join(cols)]
    for r in rows:
        lines.append(
            ",".join(
                str(r[c]) if c in ("M", "J") else format(float(r[c]), ".17g")
                for c in cols
            )
        )
    return "\n".join(lines) + "\n"


def render_figures(p: SystemParams, rows: list, out_dir: str) -> list:
    """Write the three report figures; returns the file paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    j_values = sorted({r["J"] for r in rows})
    a2_values = sorted({r["alpha_sq"] for r in rows})
    a2_mid = a2_values[len(a2_values) // 2]

    def column(name, a2):
        return [r[name] for r in rows if r["alpha_sq"] == a2]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogx(j_values, column("eve_analytic_paper", a2_mid), "o-", label="interceptor, heterodyne")
    ax.semilogx(j_values, column("srm_error", a2_mid), "s-", label="interceptor, SRM")
    ax.semilogx(j_values, column("bob_analytic_exact", a2_mid), "^-", label="key holder")
    ax.set_xlabel("phase grid size J")
    ax.set_ylabel("block error probability")
    ax.set_title(f"error vs grid size (M={p.m_modes}, alpha_sq={a2_mid:g})")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    path = os.path.join(out_dir, "error_vs_j.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for a2 in a2_values:
        ratios = [r["masking_ratio"] for r in rows if r["alpha_sq"] == a2]
        ax.loglog(j_values, ratios, "o-", label=f"alpha_sq={a2:g}")
    ax.axhline(1.0, color="k", lw=1, ls="--", label="masking threshold")
    ax.set_xlabel("phase grid size J")
    ax.set_ylabel("neighbour separation / noise unit")
    ax.set_title("phase masking margin")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    path = os.path.join(out_dir, "masking_ratio.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for j in j_values:
        errs = [r["srm_error"] for r in rows if r["J"] == j]
        ax.plot(a2_values, errs, "o-", label=f"J={j}")
    ax.set_xscale("log" if max(a2_values) / max(min(a2_values), 1e-12) > 50 else "linear")
    ax.set_xlabel("per-mode mean photon number alpha_sq")
    ax.set_ylabel("interceptor SRM block error")
    ax.set_title(f"collective-measurement error (M={p.m_modes})")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    path = os.path.join(out_dir, "srm_vs_power.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    return paths
