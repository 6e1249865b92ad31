"""Compare the compiled and pure-Python LCS kernels.

    python3 benchmarks/bench_lcs.py [--pairs N] [--length L] [--alphabet A]
"""
import argparse
import random
import timeit

from treeplan import _lcs_py
from treeplan.lcs import Encoder

try:
    from treeplan import _lcs_ext
except ImportError:
    _lcs_ext = None


def make_pairs(n, length, alphabet, seed=0):
    rng = random.Random(seed)
    enc = Encoder()
    sym = [f"tool_{i}(x={i})" for i in range(alphabet)]
    return [(enc.encode([rng.choice(sym) for _ in range(rng.randint(1, length))]),
             enc.encode([rng.choice(sym) for _ in range(rng.randint(1, length))])) for _ in range(n)]


def bench(kernel, pairs, repeat):
    fn = kernel.lcs_str
    return min(timeit.repeat(lambda: [fn(a, b) for a, b in pairs], number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--length", type=int, default=40)
    ap.add_argument("--alphabet", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    pairs = make_pairs(args.pairs, args.length, args.alphabet)
    t_py = bench(_lcs_py, pairs, args.repeat)
    print(f"python  {t_py * 1e3:9.2f} ms  ({args.pairs} pairs, length <= {args.length})")
    if _lcs_ext is None:
        print("cython  unavailable (extension not built)")
        return
    assert [_lcs_ext.lcs_str(a, b) for a, b in pairs] == [_lcs_py.lcs_str(a, b) for a, b in pairs]
    t_cy = bench(_lcs_ext, pairs, args.repeat)
    print(f"cython  {t_cy * 1e3:9.2f} ms  speedup x{t_py / t_cy:.1f}")


if __name__ == "__main__":
    main()
