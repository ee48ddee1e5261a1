#!/usr/bin/env python3
"""Write data/gut_analog.csv: synthetic compositional counts shaped like a
small gut-microbiome study (5 taxa, BMI, Age, Gender, Stratum).

The last taxon, all_others, is the logit reference. Latent log-ratios follow
the chain-graph model z_i ~ N(Omega^{-1}(mu + B^T x_i), Omega^{-1}).
"""

import argparse
import csv

import numpy as np

TAXA = ["Alistipes", "Bacteroides", "Eubacterium", "Parabacteroides", "all_others"]


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/gut_analog.csv")
    ap.add_argument("--rows", type=int, default=191)
    ap.add_argument("--seed", type=int, default=20210601)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    n = args.rows

    bmi = np.round(rng.normal(27.0, 4.5, n).clip(17.0, 45.0), 1)
    age = rng.integers(18, 76, n)
    gender = rng.choice(["female", "male"], n)
    stratum = rng.choice(["control", "obese"], n, p=[0.45, 0.55])

    x = np.column_stack([
        (bmi - bmi.mean()) / bmi.std(ddof=1),
        (age - age.mean()) / age.std(ddof=1),
        (gender == "male").astype(float),
        (stratum == "obese").astype(float),
    ])

    omega = np.array([
        [2.0, -0.8, 0.0, 0.0],
        [-0.8, 2.0, 0.6, 0.0],
        [0.0, 0.6, 2.0, -0.7],
        [0.0, 0.0, -0.7, 2.0],
    ])
    b = np.array([
        [0.9, 0.0, 0.0, -0.6],
        [0.0, 0.0, 0.5, 0.0],
        [0.0, 0.7, 0.0, 0.0],
        [-0.8, 0.0, 0.0, 0.6],
    ])
    mu = omega @ np.array([-1.5, 0.5, -2.0, -1.0])
    sigma = np.linalg.inv(omega)
    chol = np.linalg.cholesky(sigma)
    z = (mu + x @ b) @ sigma + rng.standard_normal((n, 4)) @ chol.T

    logits = np.column_stack([z, np.zeros(n)])
    probs = np.exp(logits - logits.max(axis=1, keepdims=True))
    probs /= probs.sum(axis=1, keepdims=True)
    totals = rng.integers(2000, 8001, n)
    counts = np.array([rng.multinomial(t, p) for t, p in zip(totals, probs)])

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TAXA + ["BMI", "Age", "Gender", "Stratum"])
        for i in range(n):
            w.writerow(list(counts[i]) + [bmi[i], age[i], gender[i], stratum[i]])


if __name__ == "__main__":
    main()
