"""Synthetic one-year profiles for the desk benchmark at 3-hour resolution.

Writes snapshots.csv, availability.csv and loads.csv next to this file.
Values are rounded to four decimals so every number survives a 12-digit
text round trip unchanged.
"""
import csv
import math
import pathlib

import numpy as np

T = 2920
WEIGHT = 3
MONTH_DAYS = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
SEED = 20240611


def month_of_day():
    out = []
    for m, days in enumerate(MONTH_DAYS, start=1):
        out.extend([m] * days)
    return out


def main():
    here = pathlib.Path(__file__).resolve().parent
    rng = np.random.default_rng(SEED)
    months = month_of_day()
    steps_per_day = 24 // WEIGHT

    t = np.arange(T)
    day = t // steps_per_day
    hour = (t % steps_per_day) * WEIGHT + WEIGHT / 2.0
    season = np.cos(2 * math.pi * (day - 172) / 365.0)  # +1 midsummer

    # Solar: clear-sky arc, seasonal amplitude, daily cloudiness.
    arc = np.clip(np.sin(math.pi * (hour - 6.0) / 12.0), 0.0, None)
    clouds = np.clip(rng.normal(0.8, 0.18, size=365), 0.25, 1.0)[day]
    solar = np.clip(arc * (0.72 + 0.22 * season) * clouds, 0.0, 1.0)

    # Wind: AR(1) anomaly around a winter-peaking mean.
    anomaly = np.zeros(T)
    for k in range(1, T):
        anomaly[k] = 0.93 * anomaly[k - 1] + rng.normal(0.0, 0.075)
    wind = np.clip(0.36 - 0.1 * season + anomaly, 0.0, 0.98)

    # Hydro: snowmelt peak in late spring.
    hydro = np.clip(0.62 + 0.28 * np.cos(2 * math.pi * (day - 140) / 365.0), 0.0, 1.0)

    daily = 1.0 + 0.12 * np.sin(math.pi * (hour - 9.0) / 12.0)
    winter = 1.0 - 0.08 * season
    noise = rng.normal(0.0, 0.02, size=(3, T))
    loads = {
        "load_north": 300.0 * daily * winter * (1 + noise[0]),
        "load_south": 200.0 * daily * (1 + 0.05 * season) * (1 + noise[1]),
        "load_east": 400.0 * daily * winter * (1 + noise[2]),
    }

    r4 = lambda v: f"{round(float(v), 4):.4f}".rstrip("0").rstrip(".")

    with open(here / "snapshots.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["snapshot", "month"])
        for k in range(T):
            w.writerow([k, months[day[k]]])

    with open(here / "availability.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["snapshot", "solar_south", "wind_north", "hydro_east"])
        for k in range(T):
            w.writerow([k, r4(solar[k]), r4(wind[k]), r4(hydro[k])])

    with open(here / "loads.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        names = list(loads)
        w.writerow(["snapshot"] + names)
        for k in range(T):
            w.writerow([k] + [r4(loads[n][k]) for n in names])


if __name__ == "__main__":
    main()
