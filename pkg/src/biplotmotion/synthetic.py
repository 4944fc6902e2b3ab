"""Seeded synthetic datasets shaped like the two classic demonstrations.

``gapminder_like`` has one row per continent and year (5 x 12, three
variables on very different scales). ``climate_like`` has several rows per
region and decade (10 regions x 8 levels, six climate variables).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

CONTINENTS = ("Africa", "Americas", "Asia", "Europe", "Oceania")
YEARS = tuple(range(1952, 2008, 5))
REGIONS = tuple(f"R{i:02d}" for i in range(1, 11))
DECADES = tuple(range(1950, 2021, 10))
CLIMATE_VARS = ("AP", "DE", "Temp", "SM", "SPI6", "Wind")


def gapminder_like(seed: int = 1952) -> list[dict]:
    rng = np.random.default_rng(seed)
    base = {  # lifeExp, pop, gdpPercap at the first year, yearly growth
        "Africa": (39.1, 4.6e6, 1253.0, 0.28, 0.026, 0.011),
        "Americas": (53.3, 13.8e6, 4079.0, 0.34, 0.021, 0.017),
        "Asia": (46.3, 42.3e6, 5195.0, 0.45, 0.020, 0.016),
        "Europe": (64.4, 13.9e6, 5661.0, 0.20, 0.006, 0.031),
        "Oceania": (69.3, 5.3e6, 10298.0, 0.19, 0.015, 0.021),
    }
    rows = []
    for year in YEARS:
        dt = year - YEARS[0]
        for c in CONTINENTS:
            le, pop, gdp, d_le, g_pop, g_gdp = base[c]
            rows.append({
                "year": str(year),
                "continent": c,
                "lifeExp": round(le + d_le * dt + rng.normal(0, 0.4), 2),
                "pop": round(pop * np.exp(g_pop * dt) * (1 + rng.normal(0, 0.01)), 2),
                "gdpPercap": round(gdp * np.exp(g_gdp * dt) * (1 + rng.normal(0, 0.02)), 2),
            })
    return rows


def climate_like(seed: int = 1989, rows_per_cell: int = 6, levels=DECADES,
                 regions=REGIONS, drift: float = 0.15, level_noise: float = 0.0) -> list[dict]:
    """Balanced region x level table with a shared covariance structure.

    Region means drift slowly with the level; ``level_noise`` adds an extra
    per-level perturbation of the region means.
    """
    rng = np.random.default_rng(seed)
    p = len(CLIMATE_VARS)
    loadings = rng.normal(size=(3, p))
    region_means = rng.normal(scale=2.0, size=(len(regions), p))
    region_trend = rng.normal(scale=1.0, size=(len(regions), p))
    centers = np.array([3.0, 2.5, 24.0, 0.3, 0.0, 4.0])
    spreads = np.array([1.0, 0.8, 3.0, 0.05, 1.0, 1.2])
    rows = []
    for t, level in enumerate(levels):
        shift = drift * t * region_trend + level_noise * rng.normal(size=region_means.shape)
        for r, reg in enumerate(regions):
            latent = rng.normal(size=(rows_per_cell, 3))
            z = region_means[r] + shift[r] + latent @ loadings + 0.3 * rng.normal(size=(rows_per_cell, p))
            vals = centers + spreads * z / 3.0
            for row in vals:
                rec = {"Year": str(level), "Region": reg}
                rec.update({v: round(float(x), 6) for v, x in zip(CLIMATE_VARS, row)})
                rows.append(rec)
    return rows


def write_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path
