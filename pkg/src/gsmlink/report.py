"""Delimited output, metadata round-trip, and figure rendering for CLI runs."""

from __future__ import annotations

import io
import json
from typing import Optional

import numpy as np

from .engine import BerPoint, SystemConfig

__all__ = [
    "config_meta",
    "format_csv",
    "format_json",
    "parse_metadata",
    "ber_rows",
    "render_ber_figure",
]

_CONFIG_FIELDS = (
    "scheme", "mt", "mr", "mu", "mod_kind", "mod_order", "k",
    "power_allocation", "split_mu_power", "csi", "seed",
)
_INT_FIELDS = ("mt", "mr", "mu", "mod_order", "k", "seed")
_BOOL_FIELDS = ("power_allocation", "split_mu_power")


def config_meta(cfg: SystemConfig, **extra) -> dict:
    """Flatten a config (plus run parameters) into round-trippable metadata."""
    meta = {}
    for name in _CONFIG_FIELDS:
        value = getattr(cfg, name)
        meta[name] = int(value) if isinstance(value, bool) else value
    meta.update(extra)
    return meta


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def format_csv(meta: dict, header: list, rows: list) -> str:
    """Render '#'-prefixed key=value metadata followed by a delimited table."""
    out = io.StringIO()
    for key, value in meta.items():
        out.write(f"# {key}={_fmt(value)}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(row[h]) for h in header) + "\n")
    return out.getvalue()


def format_json(meta: dict, rows: list) -> str:
    """JSON mirror of the CSV: same metadata keys, one object per row."""
    return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"


def parse_metadata(text: str) -> tuple:
    """Recover (SystemConfig, extra run parameters) from CSV metadata lines."""
    raw = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" in body:
            key, value = body.split("=", 1)
            raw[key.strip()] = value.strip()
    missing = [f for f in _CONFIG_FIELDS if f not in raw]
    if missing:
        raise ValueError(f"metadata is missing config fields: {missing}")
    kwargs = {}
    for name in _CONFIG_FIELDS:
        value = raw.pop(name)
        if name in _INT_FIELDS:
            kwargs[name] = int(value)
        elif name in _BOOL_FIELDS:
            kwargs[name] = bool(int(value))
        else:
            kwargs[name] = value
    return SystemConfig(**kwargs), raw


def ber_rows(points: list) -> list:
    """BerPoint list as row dicts in the CSV column order."""
    return [
        {
            "snr_db": p.snr_db,
            "ber": p.ber,
            "bound": p.bound,
            "frames": p.frames,
            "bits": p.bits,
            "errors": p.errors,
        }
        for p in points
    ]


BER_HEADER = ["snr_db", "ber", "bound", "frames", "bits", "errors"]


def render_ber_figure(series: list, path: str, title: Optional[str] = None) -> None:
    """Write a semilog BER-vs-SNR figure; bounds are clipped at 0.5 for display."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for s in series:
        snr = np.asarray(s["snr"], dtype=float)
        values = np.asarray(s["values"], dtype=float)
        if s.get("is_bound"):
            values = np.minimum(values, 0.5)
            ax.semilogy(snr, values, s.get("style", "--"), label=s["label"])
        else:
            mask = values > 0
            ax.semilogy(snr[mask], values[mask], s.get("style", "o-"),
                        label=s["label"])
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
