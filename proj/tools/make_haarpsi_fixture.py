"""Regenerates tests/data/haarpsi: image pairs and reference HaarPSI values.

The reference follows the published NumPy construction (scipy convolve2d in
"same" mode, 2x2 box subsampling, three Haar scales, C=30, alpha=4.2).
"""
import csv
import pathlib

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter
from scipy.signal import convolve2d

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "haarpsi"


def subsample(img):
    return convolve2d(img, np.ones((2, 2)) / 4.0, mode="same")[::2, ::2]


def haar_decompose(img, scales):
    coeffs = np.zeros(img.shape + (2 * scales,))
    for s in range(1, scales + 1):
        f = 2.0 ** (-s) * np.ones((2 ** s, 2 ** s))
        f[: f.shape[0] // 2, :] = -f[: f.shape[0] // 2, :]
        coeffs[:, :, s - 1] = convolve2d(img, f, mode="same")
        coeffs[:, :, s + scales - 1] = convolve2d(img, f.T, mode="same")
    return coeffs


def haarpsi(ref, dist, c=30.0, alpha=4.2):
    color = ref.ndim == 3
    if color:
        def yiq(x):
            r, g, b = x[..., 0], x[..., 1], x[..., 2]
            return (0.299 * r + 0.587 * g + 0.114 * b,
                    0.596 * r - 0.274 * g - 0.322 * b,
                    0.211 * r - 0.523 * g + 0.312 * b)
        ry, ri, rq = yiq(ref)
        dy, di, dq = yiq(dist)
    else:
        ry, dy = ref, dist
    ry, dy = subsample(ry), subsample(dy)
    if color:
        ri, rq, di, dq = map(subsample, (ri, rq, di, dq))
    n = 3
    cr, cd = haar_decompose(ry, n), haar_decompose(dy, n)
    layers = 3 if color else 2
    sims = np.zeros(ry.shape + (layers,))
    weights = np.zeros(ry.shape + (layers,))
    for o in range(2):
        weights[:, :, o] = np.maximum(np.abs(cr[:, :, 2 + o * n]), np.abs(cd[:, :, 2 + o * n]))
        mr = np.abs(cr[:, :, (o * n, 1 + o * n)])
        md = np.abs(cd[:, :, (o * n, 1 + o * n)])
        sims[:, :, o] = np.sum((2 * mr * md + c) / (mr ** 2 + md ** 2 + c), axis=2) / 2
    if color:
        box = np.ones((2, 2)) / 4.0
        ari, adi = np.abs(convolve2d(ri, box, mode="same")), np.abs(convolve2d(di, box, mode="same"))
        arq, adq = np.abs(convolve2d(rq, box, mode="same")), np.abs(convolve2d(dq, box, mode="same"))
        si = (2 * ari * adi + c) / (ari ** 2 + adi ** 2 + c)
        sq = (2 * arq * adq + c) / (arq ** 2 + adq ** 2 + c)
        sims[:, :, 2] = (si + sq) / 2
        weights[:, :, 2] = (weights[:, :, 0] + weights[:, :, 1]) / 2
    sig = 1.0 / (1.0 + np.exp(-alpha * sims))
    pooled = np.sum(sig * weights) / np.sum(weights)
    return (np.log(pooled / (1 - pooled)) / alpha) ** 2


def main():
    rng = np.random.default_rng(2021)
    OUT.mkdir(parents=True, exist_ok=True)
    rows = []
    cases = [(32, 32, 1), (37, 29, 3), (64, 48, 3), (25, 40, 1), (96, 96, 3), (33, 33, 3)]
    for k, (w, h, ch) in enumerate(cases):
        shape = (h, w) if ch == 1 else (h, w, ch)
        sig = (2, 2) if ch == 1 else (2, 2, 0)
        base = gaussian_filter(rng.uniform(0, 255, shape), sig)
        base = (base - base.min()) / (np.ptp(base) + 1e-9) * 255
        other = np.clip(base + rng.normal(0, 10 + 15 * k, shape), 0, 255)
        a, b = np.rint(base).astype(np.uint8), np.rint(other).astype(np.uint8)
        names = (f"case{k}_a.png", f"case{k}_b.png")
        Image.fromarray(a).save(OUT / names[0])
        Image.fromarray(b).save(OUT / names[1])
        rows.append((names[0], names[1], repr(float(haarpsi(a.astype(float), b.astype(float))))))
    with open(OUT / "expected.csv", "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["a", "b", "haarpsi"])
        wr.writerows(rows)


if __name__ == "__main__":
    main()
