"""Regenerates the natural-image test fixtures from scikit-image sample data.

Writes 224x224 crops to crates/core/tests/data/natural224 and 481x321 crops to
crates/core/tests/data/natural481. Deterministic (fixed crop offsets).
"""
import os

import numpy as np
from PIL import Image
from skimage import data

SOURCES = ["astronaut", "chelsea", "coffee", "hubble_deep_field", "immunohistochemistry",
           "motorcycle_left", "retina", "rocket"]
ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "data")


def load(name):
    if name == "motorcycle_left":
        return data.stereo_motorcycle()[0]
    return getattr(data, name)()


def square_crops(img, rng):
    h, w = img.shape[:2]
    side = min(h, w)
    yield (h - side) // 2, (w - side) // 2, side
    small = int(0.6 * side)
    for _ in range(2):
        yield int(rng.integers(0, h - small + 1)), int(rng.integers(0, w - small + 1)), small


def main():
    rng = np.random.default_rng(20240617)
    for name in SOURCES:
        img = np.ascontiguousarray(load(name)[..., :3])
        for k, (y, x, s) in enumerate(square_crops(img, rng)):
            crop = Image.fromarray(img[y:y + s, x:x + s]).resize((224, 224), Image.LANCZOS)
            crop.save(os.path.join(ROOT, "natural224", f"{name}_{k}.png"))
        h, w = img.shape[:2]
        cw, ch = (w, int(w * 321 / 481)) if w * 321 / 481 <= h else (int(h * 481 / 321), h)
        y0, x0 = (h - ch) // 2, (w - cw) // 2
        wide = Image.fromarray(img[y0:y0 + ch, x0:x0 + cw]).resize((481, 321), Image.LANCZOS)
        wide.save(os.path.join(ROOT, "natural481", f"{name}.png"))


if __name__ == "__main__":
    main()
