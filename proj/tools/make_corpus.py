#!/usr/bin/env python3
"""Regenerate tests/data/natural: 256x256 RGB crops of freely licensed photos.

Sources are the sample images bundled with scikit-image and scikit-learn.
Each output is a random square window (side between 256 px and the short edge)
area-resampled to 256x256, so every file looks like a whole-scene photo that
was resized to the canonical training size.
"""
import argparse
import os
import random

import numpy as np
import skimage
import sklearn
from PIL import Image

SKIMAGE_SOURCES = [
    "astronaut.png", "coffee.png", "chelsea.png", "camera.png", "rocket.jpg",
    "motorcycle_left.png", "motorcycle_right.png", "gravel.png", "brick.png",
    "grass.png", "moon.png", "coins.png", "retina.jpg", "hubble_deep_field.jpg",
]
SKLEARN_SOURCES = ["china.jpg", "flower.jpg"]


def sources():
    sk = os.path.join(os.path.dirname(skimage.__file__), "data")
    sl = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "images")
    return [os.path.join(sk, f) for f in SKIMAGE_SOURCES] + [
        os.path.join(sl, f) for f in SKLEARN_SOURCES
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data", "natural"))
    ap.add_argument("--count", type=int, default=32)
    ap.add_argument("--seed", type=int, default=2021)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    imgs = [Image.open(p).convert("RGB") for p in sources()]
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.count):
        img = imgs[i % len(imgs)]
        w, h = img.size
        side = rng.randint(256, min(w, h))
        x0 = rng.randint(0, w - side)
        y0 = rng.randint(0, h - side)
        crop = img.crop((x0, y0, x0 + side, y0 + side)).resize((256, 256), Image.BOX)
        if rng.random() < 0.5:
            crop = crop.transpose(Image.FLIP_LEFT_RIGHT)
        arr = np.asarray(crop, dtype=np.uint8)
        Image.fromarray(arr).save(os.path.join(args.out, f"nat_{i:03d}.png"), optimize=True)


if __name__ == "__main__":
    main()
