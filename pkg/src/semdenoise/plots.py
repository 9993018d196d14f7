"""Figure rendering for the CLI report paths.

Everything goes through the Agg backend straight to files; no display is
ever opened. Figures deliberately avoid timestamps and other run-varying
metadata so identical inputs produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .acf import AcfCurve  # noqa: E402

_DPI = 120

_METHOD_LABELS = {
    "actual_db": "actual",
    "nn_db": "nearest neighbour",
    "fol_db": "first-order extrapolation",
    "nnfol_db": "nn/extrapolation midpoint",
    "nllsr_db": "power-law fit",
    "lsr_db": "least-squares fit",
}

_FILTER_LABELS = {
    "mse_average": "box average",
    "mse_median": "median",
    "mse_gaussian": "gaussian blur",
    "mse_wiener_fixed": "wiener, fixed variance",
    "mse_nv_guided": "wiener, estimated variance",
}


def _save(fig, path) -> None:
    fig.savefig(path, dpi=_DPI, metadata={"Software": "semdenoise"})
    plt.close(fig)


def plot_acf(curve: AcfCurve, path) -> None:
    """Lag profile of the autocorrelation with the lag-zero spike visible."""
    fig, ax = plt.subplots(figsize=(6, 4))
    lags = list(range(curve.max_lag + 1))
    ax.plot(lags, curve.values, marker="o", color="#1f5fa8")
    ax.axhline(curve.mean_sq, color="#888888", linestyle="--", linewidth=1,
               label="squared mean")
    ax.set_xlabel("lag (pixels)")
    ax.set_ylabel("autocorrelation")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)


def plot_snr_benchmark(level_table, path) -> None:
    """Actual vs estimated SNR (dB) per injected noise variance."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    nv = [row["nv"] for row in level_table]
    for column, label in _METHOD_LABELS.items():
        style = {"linewidth": 2.5, "color": "#222222"} \
            if column == "actual_db" else {"linewidth": 1.2}
        ax.plot(nv, [row[column] for row in level_table], marker=".",
                label=label, **style)
    ax.set_xlabel("injected noise variance")
    ax.set_ylabel("SNR (dB)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_filter_levels(level_table, path) -> None:
    """Pre- vs post-filter MSE per injected noise variance."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    nv = [row["nv"] for row in level_table]
    ax.plot(nv, [row["mse_pre"] for row in level_table], marker="o",
            label="before filtering", color="#b33a3a")
    ax.plot(nv, [row["mse_post"] for row in level_table], marker="o",
            label="after filtering", color="#2a7f3f")
    ax.set_xlabel("injected noise variance")
    ax.set_ylabel("mean squared error")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)


def plot_filter_comparison(comparison_table, path) -> None:
    """MSE of each filtering strategy per injected noise variance."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    nv = [row["nv"] for row in comparison_table]
    for column, label in _FILTER_LABELS.items():
        style = {"linewidth": 2.5} if column == "mse_nv_guided" \
            else {"linewidth": 1.2}
        ax.plot(nv, [row[column] for row in comparison_table], marker=".",
                label=label, **style)
    ax.set_xlabel("injected noise variance")
    ax.set_ylabel("mean squared error")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
