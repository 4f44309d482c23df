#!/usr/bin/env python3
"""Regenerates the bundled synthetic dataset in data/.

Six districts on a 6 km x 4 km slope grid (20 m cells, EPSG:5179 metres).
Terrain is smooth noise with a few flat plateaus per district, some of them
on urban land so the land-use filter has something to remove.
"""
import argparse
import csv
import json
from pathlib import Path

import numpy as np

COLS, ROWS, CELL = 300, 200, 20.0
XLL, YLL = 1_000_000.0, 1_800_000.0
NODATA = -9999

# code, name, annual surplus (kWh), land price (KRW/m2), monthly rows?
REGIONS = [
    ("48110", "Hanul-si", 682.3e6, 45_000, True),
    ("48120", "Daebong-gun", 426.1e6, 62_000, True),
    ("48130", "Seoknam-gun", 346.6e6, 38_000, False),
    ("48140", "Ongcheon-gun", 120.0e6, 90_000, False),
    ("48150", "Mirae-gun", 18.0e6, 150_000, False),
    ("48160", "Pungdo-gun", 5.0e6, 30_000, False),
]
# surplus row without a boundary: reported as excluded
ORPHAN = ("48170", "Bukgok-gun", 55.0e6, 41_000)

MONTH_SHAPE = np.array([0.055, 0.065, 0.085, 0.10, 0.11, 0.10, 0.085, 0.09, 0.09, 0.08, 0.075, 0.065])


def district_ring(i, j):
    """2 km squares in a 3 x 2 layout, each with a notch cut from one corner."""
    x0, y0 = XLL + i * 2000.0, YLL + j * 2000.0
    x1, y1 = x0 + 2000.0, y0 + 2000.0
    n = 300.0 + 100.0 * i
    ring = [[x0, y0], [x1, y0], [x1, y1 - n], [x1 - n, y1 - n], [x1 - n, y1], [x0, y1], [x0, y0]]
    return ring


def write_ascii(path, grid, fmt):
    with open(path, "w", newline="\n") as f:
        f.write(f"ncols {COLS}\nnrows {ROWS}\nxllcorner {XLL:.1f}\nyllcorner {YLL:.1f}\n")
        f.write(f"cellsize {CELL:.1f}\nNODATA_value {NODATA}\n")
        for row in grid:
            f.write(" ".join(fmt(v) for v in row))
            f.write("\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240611)

    with open(out / "areal.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\r\n")
        w.writerow(["region_code", "name", "year", "month", "surplus_kwh", "land_price_krw_m2"])
        for code, name, annual, price, monthly in REGIONS:
            if monthly:
                parts = np.round(annual * MONTH_SHAPE / MONTH_SHAPE.sum(), 0)
                parts[-1] += annual - parts.sum()
                for m, v in enumerate(parts, start=1):
                    w.writerow([code, name, 2023, m, f"{v:.0f}", price])
            else:
                w.writerow([code, name, 2023, "annual", f"{annual:.0f}", price])
        code, name, annual, price = ORPHAN
        w.writerow([code, name, 2023, "annual", f"{annual:.0f}", price])

    features = []
    for k, (code, name, *_rest) in enumerate(REGIONS):
        i, j = k % 3, k // 3
        features.append({
            "type": "Feature",
            "properties": {"region_code": code, "name": name},
            "geometry": {"type": "Polygon", "coordinates": [district_ring(i, j)]},
        })
    doc = {
        "type": "FeatureCollection",
        "crs": {"type": "name", "properties": {"name": "urn:ogc:def:crs:EPSG::5179"}},
        "features": features,
    }
    (out / "regions.geojson").write_text(json.dumps(doc, indent=1) + "\n")

    # smooth terrain: a few random low-frequency waves
    yy, xx = np.mgrid[0:ROWS, 0:COLS].astype(float)
    slope = np.full((ROWS, COLS), 15.0)
    for _ in range(6):
        fx, fy = rng.uniform(0.01, 0.05, 2)
        ph = rng.uniform(0, 2 * np.pi, 2)
        slope += rng.uniform(2.0, 4.0) * np.sin(fx * xx + ph[0]) * np.cos(fy * yy + ph[1])
    slope += rng.normal(0.0, 0.4, slope.shape)

    landuse = np.full((ROWS, COLS), 2, dtype=int)
    landuse[:, 100:150] = 3
    landuse[100:, 150:250] = 4
    landuse[:60, 200:] = 1
    landuse[150:, :40] = 5
    landuse[120:140, 40:90] = 1

    # plateaus: (col, row, width px, height px); several per district
    plateaus = [
        (10, 110, 12, 10), (28, 144, 12, 12), (60, 125, 8, 8),
        (115, 120, 10, 9), (170, 110, 7, 7), (135, 170, 6, 5),
        (210, 110, 9, 12), (260, 170, 7, 7), (230, 20, 8, 8),
        (20, 20, 10, 10), (60, 40, 6, 6),
        (120, 30, 9, 9), (160, 60, 5, 5),
        (250, 10, 10, 8), (215, 70, 6, 6),
    ]
    for c, r, w_, h_ in plateaus:
        slope[r:r + h_, c:c + w_] = rng.uniform(0.5, 3.5, (h_, w_))

    slope = np.clip(slope, 0.0, 45.0)
    slope[:3, :] = NODATA  # a strip without measurements

    write_ascii(out / "slope.asc", slope, lambda v: f"{int(v)}" if v == NODATA else f"{v:.2f}")
    write_ascii(out / "landuse.asc", landuse, lambda v: f"{int(v)}")

    (out / "example.ini").write_text(
        "; bundled synthetic run; unspecified keys take their defaults\n"
        "[paths]\n"
        "areal_csv = areal.csv\n"
        "geometry = regions.geojson\n"
        "slope_raster = slope.asc\n"
        "landuse_raster = landuse.asc\n"
        "output_dir = ../out\n"
        "\n"
        "[stage1]\n"
        "k_max = 5\n"
        "mode = exhaustive\n"
        "\n"
        "[sweep]\n"
        "parameter = cost.fixed_opex_per_site_usd\n"
        "from = 1000000\n"
        "to = 10000000\n"
        "steps = 10\n"
    )


if __name__ == "__main__":
    main()
