"""
Time the direct NUDFT with the numba kernel and with the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made at import
time from PRIMESCATTER_DISABLE_NUMBA.

    python benchmarks/bench_nudft.py
    python benchmarks/bench_nudft.py --atoms 1000,10000,100000 --samples 2001
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from primescatter._accel import backend
from primescatter.lattice import WeightScheme, chi_lattice
from primescatter.spectrum import KGrid, nudft

atoms, samples, repeat = (int(a) for a in sys.argv[1:4])
m = chi_lattice(atoms, WeightScheme.GUINAND_WEIL)
grid = KGrid(1.5, 8.0, samples)
nudft(chi_lattice(10), KGrid(0.0, 1.0, 4))  # compile or load the cache outside the timing
best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    s = nudft(m, grid)
    best = min(best, time.perf_counter() - t0)
np.save(sys.argv[4], s.amplitude)
print(json.dumps({"backend": backend(), "seconds": best}))
"""


def run_backend(disable: bool, atoms: int, samples: int, repeat: int, out: str) -> dict:
    env = dict(os.environ)
    env["PRIMESCATTER_DISABLE_NUMBA"] = "1" if disable else "0"
    res = subprocess.run(
        [sys.executable, "-c", WORKER, str(atoms), str(samples), str(repeat), out],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    import tempfile

    import numpy as np

    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--atoms", default="1000,10000,30000")
    ap.add_argument("--samples", type=int, default=1001)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"{'atoms':>8} {'samples':>8} {'numba s':>10} {'numpy s':>10} {'speedup':>8} {'max rel diff':>14}")
    with tempfile.TemporaryDirectory() as tmp:
        for atoms in (int(a) for a in args.atoms.split(",")):
            fa, fb = os.path.join(tmp, "a.npy"), os.path.join(tmp, "b.npy")
            a = run_backend(False, atoms, args.samples, args.repeat, fa)
            b = run_backend(True, atoms, args.samples, args.repeat, fb)
            amp_a, amp_b = np.load(fa), np.load(fb)
            scale = max(float(np.max(np.abs(amp_a))), 1.0)
            diff = float(np.max(np.abs(amp_a - amp_b))) / scale
            print(f"{atoms:>8} {args.samples:>8} {a['seconds']:>10.3f} {b['seconds']:>10.3f} {b['seconds'] / a['seconds']:>8.2f} {diff:>14.2e}")


if __name__ == "__main__":
    main()
