"""Generate the synthetic station fixture used by tests and examples.

The values are not real measurements. Stations are scattered over a
contiguous-US-shaped box with a denser patch over the Florida peninsula;
the value is a mean-annual-temperature-like field: a latitude gradient,
a cold mountain band, a mild coastal term and a little noise.

    python3 data/make_stations_fixture.py > data/stations_fixture.csv
"""

import sys

import numpy as np

rng = np.random.default_rng(20240611)


def field(lat, lon):
    base = 29.0 - 0.62 * (lat - 25.0)
    mountains = -7.0 * np.exp(-(((lon + 108.0) / 5.0) ** 2))
    pacific = 3.0 * np.exp(-((lon + 123.0) / 2.5) ** 2)
    gulf = 1.5 * np.exp(-((lat - 27.0) / 2.0) ** 2) * np.exp(-((lon + 84.0) / 6.0) ** 2)
    return base + mountains + pacific + gulf


rows = []

# mainland
n_main = 210
lat = rng.uniform(30.5, 48.8, n_main)
lon = rng.uniform(-124.0, -67.5, n_main)
for i in range(n_main):
    rows.append((f"US{i:03d}", lat[i], lon[i]))

# Florida peninsula: a strip that narrows to the south
n_fl = 30
fl_lat = rng.uniform(25.2, 30.4, n_fl)
fl_lon = -81.3 + rng.uniform(-1.2, 1.2, n_fl) * (0.6 + 0.4 * (fl_lat - 25.0) / 5.4)
for i in range(n_fl):
    rows.append((f"FL{i:03d}", fl_lat[i], fl_lon[i]))

# gulf coast and Texas south
n_gulf = 14
g_lat = rng.uniform(26.0, 30.5, n_gulf)
g_lon = rng.uniform(-99.0, -88.0, n_gulf)
for i in range(n_gulf):
    rows.append((f"GC{i:03d}", g_lat[i], g_lon[i]))

out = sys.stdout
out.write("station_id,latitude,longitude,value\n")
missing = {"US017", "US142"}
for sid, la, lo in rows:
    if sid in missing:
        out.write(f"{sid},{la:.4f},{lo:.4f},NA\n")
        continue
    v = field(la, lo) + rng.normal(0.0, 0.4)
    out.write(f"{sid},{la:.4f},{lo:.4f},{v:.3f}\n")
