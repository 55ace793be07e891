"""Compare the numba-compiled and pure-Python cut-set kernels.

Both backends run the same exact searches on the same instances; the script
checks that they return identical answers and prints per-case timings.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

from __future__ import annotations

import argparse
import statistics
import time

from mafkernel import _kernels
from mafkernel.generate import random_instance, tight_family_A, tight_family_B
from mafkernel.solver import maf_cutset


def cases(quick: bool):
    out = [
        ("random n=7 t=2 unrooted", random_instance(7, 2, False, seed=11), None),
        ("random n=8 t=3 rooted", random_instance(8, 3, True, seed=12), None),
        ("family A t=3 (kmax=4)", tight_family_A(3).trees, 4),
    ]
    if not quick:
        out += [
            ("random n=9 t=3 unrooted", random_instance(9, 3, False, seed=13), None),
            ("family B k=4 (kmax=4)", tight_family_B(4).trees, 4),
        ]
    return out


def timed(fn, repeat: int) -> tuple[float, object]:
    times = []
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the larger cases")
    args = ap.parse_args(argv)

    # compile (or load from cache) outside the timed region
    t0 = time.perf_counter()
    warm = random_instance(4, 2, False, seed=0)
    maf_cutset(warm, 4, use_numba=True)
    maf_cutset(random_instance(4, 2, True, seed=0), 4, use_numba=True)
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f} s")

    print(f"{'case':<28}{'numba s':>10}{'pure s':>10}{'speedup':>10}  result")
    ok = True
    for name, ts, kmax in cases(args.quick):
        kmax = ts.n if kmax is None else kmax
        tj, rj = timed(lambda: maf_cutset(ts, kmax, use_numba=True), args.repeat)
        tp, rp = timed(lambda: maf_cutset(ts, kmax, use_numba=False), 1)
        same = (rj is None and rp is None) or (rj is not None and rp is not None and rj.witness == rp.witness)
        ok &= same
        res = "none <= kmax" if rj is None else f"maf={rj.maf_size}"
        print(f"{name:<28}{tj:>10.4f}{tp:>10.3f}{tp / max(tj, 1e-9):>10.1f}  {res}{'' if same else '  MISMATCH'}")
    print("backends agree" if ok else "BACKENDS DISAGREE")
    assert _kernels.backend(True).compiled and not _kernels.backend(False).compiled
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
