#!/usr/bin/env python3
# Copyright 2026 The pathcalc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
"""Independent numpy oracle for the pinned acceptance values.

Rebuilds the seeded paths from the generator definition (counter-based
SplitMix64, Box-Muller, exponential jump gaps) and evaluates the pinned
quantities with closed forms instead of the library's functional machinery.

    python3 tests/oracle/oracle.py tests/fixtures

writes brownian_qv_1000.csv and thresholds.csv into the given directory.
"""

import argparse
import math
import pathlib

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
STREAM_SALT = np.uint64(0x632BE59BD9B4E019)
BROWNIAN, JUMP_TIMES, JUMP_MARKS = 1, 2, 3

DEPTH = 16
LEVEL = 14
BAND = (0.95, 1.05)


def splitmix(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * M1
        x = (x ^ (x >> np.uint64(27))) * M2
    return x ^ (x >> np.uint64(31))


def key(seed, stream):
    with np.errstate(over="ignore"):
        inner = splitmix(np.uint64(stream) * GOLDEN + STREAM_SALT)
    return splitmix(np.uint64(seed) ^ inner)


def uniforms(seed, stream, counters):
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = splitmix(key(seed, stream) + (counters + np.uint64(1)) * GOLDEN)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed, stream, n):
    c = np.arange(n, dtype=np.uint64)
    u1 = uniforms(seed, stream, 2 * c)
    u2 = uniforms(seed, stream, 2 * c + np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def brownian(seed, depth=DEPTH, sigma=1.0):
    n = 1 << depth
    x = np.zeros(n + 1)
    x[1:] = np.cumsum(sigma * math.sqrt(1.0 / n) * normals(seed, BROWNIAN, n))
    return x


def poisson_jumps(seed, rate, low, high, depth=DEPTH):
    n = 1 << depth
    step = 1.0 / n
    cells = {}
    t, k = 0.0, 0
    while True:
        t += -math.log(float(uniforms(seed, JUMP_TIMES, [k])[0])) / rate
        if t > 1.0:
            break
        index = min(max(1, math.ceil(t / step - 1e-9)), n)
        mark = low + (high - low) * float(uniforms(seed, JUMP_MARKS, [k])[0])
        cells[index] = cells.get(index, 0.0) + mark
        k += 1
    return {i: d for i, d in cells.items() if d != 0.0}


def dyadic_qv(x, level):
    stride = (len(x) - 1) >> level
    return float(np.sum(np.diff(x[::stride]) ** 2))


def ito_residual(x, level):
    """Residual of the change-of-variable formula for f(t, x) = t x^2.

    Writing t_{i+1} x_{i+1}^2 - t_i x_i^2 = h x_{i+1}^2 + t_i (2 x_i dx + dx^2)
    and subtracting the left-point terms h x_i^2, t_i dx^2 and 2 t_i x_i dx
    leaves sum_i h (x_{i+1}^2 - x_i^2).
    """
    n = len(x) - 1
    xs = x[:: n >> level]
    h = 1.0 / (len(xs) - 1)
    return float(np.sum(h * (xs[1:] ** 2 - xs[:-1] ** 2)))


def doleans_jd_residual(seed, level, rate=5.0, low=-0.5, high=0.5, sigma=1.0):
    """Cadlag-mode residual for the Doleans exponential on a jump-diffusion."""
    n = 1 << DEPTH
    step = 1.0 / n
    v = sigma * sigma
    jumps = poisson_jumps(seed, rate, low, high)
    x = brownian(seed, sigma=sigma)
    for i, d in jumps.items():
        x[i:] += d
    times = np.arange(n + 1) * step

    # log of the jump product over registry jumps at indices <= i
    log_all = np.zeros(n + 1)
    for i, d in jumps.items():
        log_all[i:] += math.log1p(d) - d
    Y = np.exp(x - 0.5 * v * times + log_all)

    sub = set(range(0, n + 1, n >> level))
    sub |= {i for i, d in jumps.items() if abs(d) >= 1.0 / level}
    sub = np.array(sorted(sub))
    big = {i: d for i, d in jumps.items() if i in set(sub.tolist())}
    log_sub = np.zeros(n + 1)
    for i, d in big.items():
        log_sub[i:] += math.log1p(d) - d

    a, b = sub[:-1], sub[1:]
    h = (b - a) * step
    dx = x[b] - x[a]
    delta_next = np.array([jumps.get(int(i), 0.0) for i in b])
    horizontal = np.sum(-0.5 * v * Y[a] * h)
    trace = np.sum(0.5 * Y[a] * (dx**2 - delta_next**2))
    snapshot = np.exp(x[a] - 0.5 * v * times[a] + log_sub[a])
    follmer = np.sum(snapshot * dx)
    # each jump term Y(u-)(1 + d) - Y(u-) - Y(u-) d vanishes identically
    lhs = Y[-1] - Y[0]
    return float(lhs - (horizontal + trace + follmer))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--seeds", type=int, default=1000)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    qvs = {seed: dyadic_qv(brownian(seed), LEVEL) for seed in range(1, args.seeds + 1)}
    shipped = dyadic_qv(brownian(42), LEVEL)
    inside = sum(BAND[0] <= q <= BAND[1] for q in qvs.values())
    with open(args.out_dir / "brownian_qv_1000.csv", "w") as f:
        f.write("# level-14 dyadic QV of the depth-16 unit Brownian path per seed (numpy oracle)\n")
        f.write(f"# band [{BAND[0]}, {BAND[1]}], {inside} of {args.seeds} seeds inside\n")
        f.write("seed,qv\n")
        for seed, q in qvs.items():
            f.write(f"{seed},{q:.17g}\n")
        f.write(f"fraction_in_band,{inside / args.seeds:.17g}\n")
        f.write(f"shipped_seed_qv,{shipped:.17g}\n")

    x42 = brownian(42)
    ito = abs(ito_residual(x42, LEVEL))
    jd = abs(doleans_jd_residual(42, LEVEL))
    # Threshold with a factor-2 margin over the oracle value so that ulp-level
    # summation-order differences cannot flip the verdict.
    with open(args.out_dir / "thresholds.csv", "w") as f:
        f.write("# pinned by tests/oracle/oracle.py (seed 42, level 14)\n")
        f.write("key,value\n")
        f.write(f"ito_residual_level14,{ito:.17g}\n")
        f.write(f"doleans_jd_residual_level14,{jd:.17g}\n")
        f.write(f"doleans_jd_threshold,{2.0 * jd:.17g}\n")
    print(f"shipped qv {shipped:.6f}; {inside}/{args.seeds} in band; ito {ito:.3e}; doleans jd {jd:.3e}")


if __name__ == "__main__":
    main()
