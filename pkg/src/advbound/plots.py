"""Figure rendering for the report paths.

Figures are written next to the delimited output; the CSV stays the
primary machine-readable artifact. Uses the Agg backend so reports render
headlessly.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .adversary import SpectralReport  # noqa: E402
from .evolve import DerivativeVerdict, ProgressTrace  # noqa: E402

_RC = {
    "figure.figsize": (7.0, 4.4),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
}


def progress_figure(
    trace: ProgressTrace,
    verdict: DerivativeVerdict,
    path: str,
    eps_prime: float | None = None,
):
    """|w| and its measured slope against the derivative cap."""
    with plt.rc_context(_RC):
        fig, (ax_w, ax_s) = plt.subplots(2, 1, sharex=True)
        t = trace.times
        ax_w.plot(t, trace.w_abs, lw=1.2, color="tab:blue")
        ax_w.axhline(trace.w_abs[0], color="gray", lw=0.8, ls=":")
        if eps_prime is not None:
            ax_w.axhline(
                eps_prime * trace.w_abs[0],
                color="tab:red",
                lw=0.8,
                ls="--",
                label="output condition",
            )
            ax_w.legend(loc="best")
        ax_w.set_ylabel("|w(t)|")

        ax_s.plot(t, abs(trace.dw_estimate), lw=1.0, color="tab:orange")
        ax_s.axhline(
            verdict.cap, color="tab:red", lw=1.0, ls="--",
            label=f"cap = {verdict.cap:.6g}",
        )
        ax_s.set_ylabel("|d|w|/dt|")
        ax_s.set_xlabel("t (unit oracle rate; one query = pi)")
        ax_s.legend(loc="best")
        fig.suptitle(
            f"progress measure: max slope {verdict.measured_max_slope:.6g}"
            f" vs cap {verdict.cap:.6g}"
        )
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def spectral_figure(report: SpectralReport, path: str):
    """Per-bit norms lambda(Gamma_j) against lambda(Gamma)."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        n = len(report.lambda_gamma_j)
        ax.bar(range(1, n + 1), report.lambda_gamma_j, color="tab:blue", width=0.6)
        ax.axhline(
            report.lambda_gamma, color="tab:red", lw=1.0, ls="--",
            label=f"lambda(Gamma) = {report.lambda_gamma:.6g}",
        )
        ax.set_xlabel("bit index j")
        ax.set_ylabel("lambda(Gamma_j)")
        ax.set_xticks(range(1, n + 1))
        ax.set_title(f"bound ratio = {report.bound_ratio:.9g}")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
