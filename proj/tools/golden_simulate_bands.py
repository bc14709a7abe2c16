#!/usr/bin/env python3
"""Fine-grid oracle for the simulate-bands golden file.

Both curves are linearly interpolated onto a uniform 0.001 nm grid and
integrated with the trapezoid rule.
"""
import sys

import numpy as np


def load(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")


def main(rsr_path, out_path, spectra):
    rsr = load(rsr_path)
    bands = ["B2", "B3", "B4", "B5", "B6", "B7", "B8"]
    rows = []
    for date, path in enumerate(spectra):
        sp = load(path)
        vals = []
        for b in bands:
            sel = rsr["band"] == b
            wl = rsr["wavelength_nm"][sel].astype(float)
            resp = rsr["response"][sel].astype(float)
            grid = np.linspace(wl[0], wl[-1], int(round((wl[-1] - wl[0]) / 0.001)) + 1)
            r = np.interp(grid, wl, resp)
            s = np.interp(grid, sp["wavelength_nm"].astype(float), sp["reflectance"].astype(float))
            vals.append(np.trapezoid(r * s, grid) / np.trapezoid(r, grid))
        rows.append((date, vals))
    with open(out_path, "w") as f:
        f.write("row,col,date," + ",".join(bands) + "\n")
        for date, vals in rows:
            f.write(f"0,0,{date}," + ",".join(f"{v:.10f}" for v in vals) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2], sys.argv[3:])
