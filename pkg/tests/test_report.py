"""Metadata round-trips, delimited rendering, and figure output."""

import json
import os

import numpy as np
import pytest

from gsmlink.engine import BerPoint, SystemConfig
from gsmlink.report import (
    BER_HEADER,
    ber_rows,
    config_meta,
    format_csv,
    format_json,
    parse_metadata,
    render_ber_figure,
)

CFG = SystemConfig(scheme="dmgsm", mt=5, mr=2, mu=2, mod_kind="qam",
                   mod_order=4, k=200, power_allocation=True,
                   split_mu_power=True, seed=42)

POINTS = [
    BerPoint(10.0, 50, 70000, 311, 311 / 70000, 0.02),
    BerPoint(14.0, 400, 560000, 298, 298 / 560000, 0.003),
]


def test_config_meta_round_trip():
    text = format_csv(config_meta(CFG, snr="10:2:20"), BER_HEADER,
                      ber_rows(POINTS))
    cfg, extra = parse_metadata(text)
    assert cfg == CFG
    assert extra == {"snr": "10:2:20"}


def test_meta_booleans_render_as_ints():
    meta = config_meta(CFG)
    assert meta["power_allocation"] == 1
    assert meta["split_mu_power"] == 1
    assert isinstance(meta["power_allocation"], int)


def test_csv_layout():
    text = format_csv(config_meta(CFG), BER_HEADER, ber_rows(POINTS))
    lines = text.strip().split("\n")
    assert lines[0] == "# scheme=dmgsm"
    header_at = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header_at] == "snr_db,ber,bound,frames,bits,errors"
    first = lines[header_at + 1].split(",")
    assert first[0] == "10"
    assert float(first[1]) == pytest.approx(311 / 70000)
    assert len(lines) == header_at + 1 + len(POINTS)


def test_csv_none_renders_empty():
    pts = [BerPoint(5.0, 2, 800, 100, 0.125, None)]
    text = format_csv({}, BER_HEADER, ber_rows(pts))
    row = text.strip().split("\n")[1]
    assert row.split(",")[2] == ""


def test_json_mirrors_csv():
    text = format_json(config_meta(CFG, snr="1"), ber_rows(POINTS))
    doc = json.loads(text)
    assert doc["meta"]["scheme"] == "dmgsm"
    assert doc["meta"]["snr"] == "1"
    assert len(doc["rows"]) == 2
    assert doc["rows"][0]["snr_db"] == 10.0
    assert doc["rows"][1]["errors"] == 298


def test_parse_metadata_requires_all_fields():
    with pytest.raises(ValueError, match="missing"):
        parse_metadata("# scheme=dgsm\nsnr_db,ber\n")


def test_parse_metadata_stops_at_table():
    text = format_csv(config_meta(CFG), BER_HEADER, ber_rows(POINTS))
    text += "# scheme=other\n"  # past the table; must be ignored
    cfg, _ = parse_metadata(text)
    assert cfg.scheme == "dmgsm"


def test_render_ber_figure(tmp_path):
    path = tmp_path / "curve.png"
    series = [{
        "label": "measured",
        "snr": [p.snr_db for p in POINTS],
        "values": [p.ber for p in POINTS],
    }]
    render_ber_figure(series, str(path), title="demo")
    data = path.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 5000


def test_render_ber_figure_clips_bound(tmp_path):
    # bound values above 0.5 must not blow up the axis scale
    series = [
        {"label": "sim", "snr": [0.0, 10.0], "values": [0.3, 0.08]},
        {"label": "bound", "snr": [0.0, 10.0], "values": [4.4, 0.04],
         "is_bound": True},
        {"label": "zero tail", "snr": [0.0, 10.0], "values": [0.1, 0.0]},
    ]
    path = tmp_path / "clip.png"
    render_ber_figure(series, str(path))
    assert path.exists() and path.stat().st_size > 0
