"""Seeded special-case scenarios contrasting S with Kendall tau and overlap.

Scenarios, for rankings of length ``n``:

``reverse``
    one ranking is the other reversed.
``random_permutation``
    same ids, independent random order.
``first_half_shared`` / ``second_half_shared``
    one half holds the same ids in a random relative order, the other half
    is disjoint.
``adjacent_swap``
    swap of the top two versus the bottom two positions.

Every trial draws from its own child of ``numpy.random.SeedSequence(seed)``,
so results do not depend on the thread count.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._validation import check_positive_int
from .exceptions import DegenerateInput, InvalidParams
from .ranksim import compare, pearson

PAPER_N = 1000
PAPER_TRIALS = 1000
RANDOM_SCENARIOS = ("random_permutation", "first_half_shared", "second_half_shared")


def reverse_pair(n):
    q = list(range(n))
    return q, q[::-1]


def random_permutation_pair(n, rng):
    q = list(range(n))
    return q, rng.permutation(n).tolist()


def half_shared_pair(n, rng, shared="first"):
    """Rankings sharing one half (randomly reordered) with a disjoint other half."""
    if n < 2 or n % 2:
        raise InvalidParams(f"half-shared scenarios need an even n >= 2, got {n}")
    half = n // 2
    q1 = list(range(n))
    if shared == "first":
        q2 = rng.permutation(half).tolist() + list(range(n, n + half))
    elif shared == "second":
        q2 = list(range(n, n + half)) + (half + rng.permutation(half)).tolist()
    else:
        raise InvalidParams(f"shared must be 'first' or 'second', got {shared!r}")
    return q1, q2


def _make_pair(name, n, rng):
    if name == "random_permutation":
        return random_permutation_pair(n, rng)
    if name == "first_half_shared":
        return half_shared_pair(n, rng, "first")
    return half_shared_pair(n, rng, "second")


def _trial(args):
    name, n, seed_seq = args
    q1, q2 = _make_pair(name, n, np.random.default_rng(seed_seq))
    return compare(q1, q2)


def _maybe_pearson(xs, ys):
    try:
        return pearson(xs, ys)
    except DegenerateInput:
        return None


def _aggregate(rows):
    s = np.array([r["s"] for r in rows])
    tau = np.array([r["kendall"] for r in rows])
    ov = np.array([r["overlap"] for r in rows])
    ddof = 1 if len(rows) > 1 else 0
    return {
        "trials": len(rows),
        "mean_s": float(s.mean()),
        "std_s": float(s.std(ddof=ddof)),
        "mean_kendall": float(tau.mean()),
        "std_kendall": float(tau.std(ddof=ddof)),
        "mean_overlap": float(ov.mean()),
        "pearson_s_kendall": _maybe_pearson(s, tau) if len(rows) > 1 else None,
        "pearson_s_overlap": _maybe_pearson(s, ov) if len(rows) > 1 else None,
    }


def run_trials(name, n, trials, seed, threads=1):
    """Per-trial result dicts for one random scenario."""
    if name not in RANDOM_SCENARIOS:
        raise InvalidParams(f"unknown scenario {name!r}")
    root = np.random.SeedSequence([seed, RANDOM_SCENARIOS.index(name)])
    jobs = [(name, n, child) for child in root.spawn(trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_trial, jobs))
    return [_trial(job) for job in jobs]


def special_cases(n=PAPER_N, trials=PAPER_TRIALS, seed=0, threads=1):
    """Run every scenario and return a JSON-ready report."""
    n = check_positive_int(n, "n")
    trials = check_positive_int(trials, "trials")
    threads = check_positive_int(threads, "threads")
    report = {"n": n, "trials": trials, "seed": seed}
    q1, q2 = reverse_pair(n)
    report["reverse"] = compare(q1, q2)

    per_trial = {}
    for name in RANDOM_SCENARIOS:
        if name != "random_permutation" and n % 2:
            report[name] = {"skipped": f"needs an even n, got {n}"}
            continue
        per_trial[name] = run_trials(name, n, trials, seed, threads)
        report[name] = _aggregate(per_trial[name])

    if "first_half_shared" in per_trial:
        first = [r["s"] for r in per_trial["first_half_shared"]]
        second = [r["s"] for r in per_trial["second_half_shared"]]
        report["asymmetry"] = {
            "first_beats_second_every_trial": all(a > b for a, b in zip(first, second)),
            "min_margin": float(min(a - b for a, b in zip(first, second))),
        }
    if n >= 3:
        base = list(range(n))
        top = [1, 0] + base[2:]
        bottom = base[:-2] + [base[-1], base[-2]]
        report["adjacent_swap"] = {
            "s_top_swap": compare(base, top)["s"],
            "s_bottom_swap": compare(base, bottom)["s"],
        }
    return report
