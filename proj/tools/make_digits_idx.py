"""Write scikit-learn's 8x8 digits, upscaled to 28x28, as MNIST-style IDX files.

A stand-in for smoke-testing the CLI where MNIST itself is not available:

    python3 tools/make_digits_idx.py data/digits
"""

import argparse
import pathlib
import struct

import numpy as np
from PIL import Image
from sklearn.datasets import load_digits


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=pathlib.Path)
    ap.add_argument("--test-fraction", type=float, default=0.25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    digits = load_digits()
    # 0..16 intensities -> 0..255, 8x8 -> 20x20 centred in 28x28 like MNIST
    imgs = []
    for img in digits.images:
        small = Image.fromarray((img * 255.0 / 16.0).astype(np.uint8))
        big = np.zeros((28, 28), dtype=np.uint8)
        big[4:24, 4:24] = np.asarray(small.resize((20, 20), Image.BILINEAR))
        imgs.append(big)
    imgs = np.stack(imgs)

    order = np.random.default_rng(args.seed).permutation(len(imgs))
    n_test = int(len(imgs) * args.test_fraction)
    test, train = order[:n_test], order[n_test:]

    args.out.mkdir(parents=True, exist_ok=True)
    write_images(args.out / "train-images-idx3-ubyte", imgs[train])
    write_labels(args.out / "train-labels-idx1-ubyte", digits.target[train])
    write_images(args.out / "t10k-images-idx3-ubyte", imgs[test])
    write_labels(args.out / "t10k-labels-idx1-ubyte", digits.target[test])
    print(f"{len(train)} train / {n_test} test images in {args.out}")


if __name__ == "__main__":
    main()
