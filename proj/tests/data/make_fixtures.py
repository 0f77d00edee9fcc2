"""Regenerates the synthetic admissions fixtures in this directory.

Both files follow the ingest schemas; none of the values are real applicant
data. Run from anywhere: python3 tests/data/make_fixtures.py
"""
import csv
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent
rng = np.random.default_rng(20170215)


def gre(lo, hi):
    return int(rng.integers(lo, hi + 1))


def writing(lo, hi):
    return float(rng.integers(int(lo * 2), int(hi * 2) + 1)) / 2


def unranked():
    header = ["id", "category", "gre_writing_self", "gre_verbal_self", "gre_quant_self",
              "gre_writing_official", "gre_verbal_official", "gre_quant_official",
              "gpa", "lor1", "lor2", "lor3"]
    # Better categories draw from better ranges.
    bands = {"fellowship": (158, 170, 4.0, 6.0, 3.6, 4.0, 2.2, 3.0),
             "admit": (150, 166, 3.5, 5.5, 3.2, 3.9, 1.6, 2.8),
             "deny": (135, 160, 2.0, 4.5, 2.0, 3.6, 0.5, 2.2)}
    counts = {"fellowship": 40, "admit": 40, "deny": 45}
    rows = []
    n = 0
    for cat, cnt in counts.items():
        vlo, vhi, wlo, whi, glo, ghi, llo, lhi = bands[cat]
        for k in range(cnt):
            n += 1
            official = [writing(wlo, whi), gre(vlo, vhi), gre(vlo, vhi)]
            self_rep = [writing(wlo, whi), gre(vlo, vhi), gre(vlo, vhi)]
            letters = [round(float(rng.uniform(llo, lhi)), 1) for _ in range(3)]
            gpa = round(float(rng.uniform(glo, ghi)), 2)
            row = [f"c{n:03d}", cat, *self_rep, *official, gpa, *letters]
            if k % 5 == 1:   # only self-reported scores
                row[5:8] = ["", "", ""]
            if k % 7 == 2:   # only official scores
                row[2:5] = ["", "", ""]
            if k % 11 == 3:  # two letters
                row[11] = ""
            rows.append(row)
    rows[0][9:12] = [3, 3, 3]  # perfect letters
    bad = [
        ["x01", "admit", 4.0, 160, 160, "", "", "", 4.7, 2, 2, 2],          # GPA above 4
        ["x02", "deny", 3.0, 150, 150, "", "", "", "", 1, 1, 1],            # GPA missing
        ["x03", "fellowship", "", "", "", "", "", "", 3.9, 3, 3, 3],        # no GRE at all
        ["x04", "admit", 4.0, 175, 160, "", "", "", 3.5, 2, 2, 2],          # verbal out of range
        ["x05", "deny", 4.3, 150, 150, "", "", "", 3.0, 1, 1, 1],           # writing not a half step
        ["x06", "admit", 4.0, 160, 160, "", "", "", 3.5, 3.5, 2, 2],        # letter above 3
        ["x07", "deny", 3.0, 150, 150, "", "", "", 3.0, "", "", ""],        # no letters
        ["x08", "fellowship", 5.0, 165, 168, 5.0, 165, 168, 0.8, 3, 3, 3],  # GPA below 1
    ]
    rows.extend(bad)
    with open(HERE / "admissions_unranked.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def ranked():
    # Eleven distinct top scores, then eight tied bins.
    scores = [round(1.0 + 0.1 * k, 1) for k in range(11)]
    for score, size in zip(range(3, 11), [1, 2, 2, 2, 4, 6, 12, 48]):
        scores += [float(score)] * size
    rows = []
    for n, s in enumerate(scores, 1):
        q = (10.0 - s) / 9.0  # 1 for the best score, 0 for the worst
        rows.append([f"r{n:03d}", s, writing(2 + 2 * q, 4 + 2 * q),
                     gre(int(140 + 20 * q), int(155 + 15 * q)), gre(int(140 + 20 * q), int(155 + 15 * q)),
                     round(float(rng.uniform(2.5 + q, 3.0 + q)), 2) if q < 1 else 4.0])
    with open(HERE / "admissions_ranked.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "score", "gre_writing", "gre_verbal", "gre_quant", "gpa"])
        w.writerows(rows)


if __name__ == "__main__":
    unranked()
    ranked()
