"""Compare the compiled lattice kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each workload runs once per backend on identical inputs; results must agree.
"""

from __future__ import annotations

import argparse
import random
import time

from grexpand import _pykernels, kernels
from grexpand.corpus import groups_up_to, matrix_endomorphisms
from grexpand.dynamics import certify_positively_expansive_finite
from grexpand.subgroup import all_subgroups


def _lattice_inputs(n, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        mods = [rng.choice([2, 3, 4, 6, 8, 9, 12, 16, 27]) for _ in range(rng.randint(2, 6))]
        rows = [[rng.randrange(-100, 100) for _ in mods] for _ in range(rng.randint(1, 6))]
        out.append((mods, rows))
    return out


def _trajectory_inputs(n, seed=1):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        mods = [rng.choice([2, 4, 8, 16]) for _ in range(rng.randint(2, 5))]
        s = len(mods)
        A = [[rng.randrange(mods[i]) * (mods[i] // min(mods[i], mods[j])) % mods[i] for j in range(s)]
             for i in range(s)]
        out.append((mods, A, [[rng.randrange(m) for m in mods]]))
    return out


def _certify_workload():
    cases = []
    for spec in groups_up_to(8, include_trivial=False):
        subs = all_subgroups(spec)
        for phi in matrix_endomorphisms(spec):
            cases.extend((phi, S) for S in subs)
    return cases


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernels._ckernels is None:
        print("compiled kernels unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    C = kernels._ckernels
    lat = _lattice_inputs(5000)
    traj = _trajectory_inputs(1000)
    cert = _certify_workload()

    def run_certify(use_c):
        saved = kernels._ckernels
        kernels._ckernels = C if use_c else None
        try:
            return [certify_positively_expansive_finite(phi, S).n_star for phi, S in cert]
        finally:
            kernels._ckernels = saved

    workloads = [
        ("hnf_mod x5000", lambda: [C.hnf_mod(r, m) for m, r in lat],
         lambda: [_pykernels.hnf_mod(r, m) for m, r in lat]),
        ("trajectory x1000", lambda: [C.trajectory(m, A, F, 16) for m, A, F in traj],
         lambda: [_pykernels.trajectory(m, A, F, 16) for m, A, F in traj]),
        (f"certify x{len(cert)}", lambda: run_certify(True), lambda: run_certify(False)),
    ]
    print(f"{'workload':<22}{'compiled':>12}{'python':>12}{'speedup':>10}")
    for name, fc, fp in workloads:
        tc, oc = _time(fc, args.repeat)
        tp, op = _time(fp, args.repeat)
        if oc != op:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<22}{tc * 1000:>10.1f}ms{tp * 1000:>10.1f}ms{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
