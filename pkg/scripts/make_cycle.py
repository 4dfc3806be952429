"""Regenerate the bundled default drive cycle (data/cycle_1800s.csv).

Synthesizes a WLTC-class-3-like speed trace: four phases (low, medium,
high, extra-high) over 1800 s at 1 Hz, built from hand-placed knot points,
linearly interpolated and lightly smoothed. Deterministic; rerunning
reproduces the committed file byte for byte.
"""

from pathlib import Path

import numpy as np

# (time s, speed km/h) knots per phase; phases end at 589/1022/1477/1800 s
KNOTS = [
    # low phase: stop-and-go urban driving, peaks near 56 km/h
    (0, 0), (11, 0), (21, 32), (31, 45), (41, 38), (51, 50), (61, 54),
    (76, 42), (86, 47), (96, 30), (106, 0), (121, 0), (131, 35), (146, 42),
    (161, 26), (171, 39), (186, 46), (201, 36), (211, 0), (236, 0),
    (248, 44), (261, 52), (271, 56.5), (286, 46), (301, 51), (316, 38),
    (331, 20), (341, 33), (356, 25), (366, 0), (391, 0), (401, 32),
    (416, 43), (431, 49), (446, 36), (461, 45), (476, 28), (486, 36),
    (506, 20), (516, 29), (531, 15), (541, 23), (556, 10), (571, 5),
    (581, 0), (589, 0),
    # medium phase, peaks near 76 km/h
    (599, 0), (611, 42), (626, 60), (641, 55), (656, 66), (671, 71),
    (686, 62), (701, 68), (716, 76.6), (731, 70), (746, 60), (761, 66),
    (776, 55), (791, 61), (806, 48), (821, 57), (836, 40), (851, 30),
    (861, 0), (876, 0), (888, 44), (903, 58), (918, 66), (933, 60),
    (948, 69), (963, 55), (978, 40), (996, 25), (1012, 0), (1022, 0),
    # high phase, peaks near 97 km/h
    (1032, 0), (1047, 48), (1066, 70), (1086, 81), (1106, 75), (1126, 86),
    (1146, 91), (1166, 97.4), (1186, 92), (1206, 85), (1226, 89),
    (1246, 80), (1266, 85), (1286, 75), (1306, 81), (1326, 70), (1346, 76),
    (1366, 65), (1386, 55), (1406, 45), (1426, 30), (1446, 15), (1462, 0),
    (1477, 0),
    # extra-high phase, peaks near 131 km/h
    (1487, 0), (1502, 52), (1522, 84), (1542, 101), (1562, 111),
    (1582, 105), (1602, 116), (1622, 126), (1642, 131.3), (1662, 125),
    (1682, 118), (1702, 123), (1722, 110), (1742, 92), (1762, 62),
    (1782, 24), (1795, 0), (1799, 0),
]


def build() -> np.ndarray:
    t_knots = np.array([k[0] for k in KNOTS], dtype=float)
    v_knots = np.array([k[1] for k in KNOTS], dtype=float)
    t = np.arange(0.0, 1800.0)
    v = np.interp(t, t_knots, v_knots)
    # 3-point smoothing keeps the knots' character but rounds the corners
    sm = v.copy()
    sm[1:-1] = (v[:-2] + 2.0 * v[1:-1] + v[2:]) / 4.0
    sm[sm < 0.05] = 0.0
    return np.round(sm / 3.6, 4)  # km/h -> m/s


def main() -> None:
    v = build()
    out = Path(__file__).resolve().parents[1] / "src" / "hessopt" / "data" / "cycle_1800s.csv"
    lines = ["t_s,v_mps"]
    lines += [f"{i},{v[i]:.4f}" for i in range(v.size)]
    out.write_text("\n".join(lines) + "\n")
    dist = v.sum() / 1000.0
    print(f"wrote {out} ({v.size} samples, {dist:.3f} km, v_max {v.max() * 3.6:.1f} km/h)")


if __name__ == "__main__":
    main()
