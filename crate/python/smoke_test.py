#!/usr/bin/env python3
"""Smoke test for the tplab_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/
(`cargo build --release -p tplab-py` first), stages it under an importable
name, and exercises one happy path through every subsystem.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libtplab_py.so", "tplab_py.so", "libtplab_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("tplab_py not built; run: cargo build --release -p tplab-py")
    stage = Path(tempfile.mkdtemp(prefix="tplab_py_"))
    shutil.copy2(built, stage / "tplab_py.so")
    sys.path.insert(0, str(stage))


stage_module()
import tplab_py as tp  # noqa: E402

checks = 0


def check(name: str, ok: bool, detail: str = "") -> None:
    global checks
    checks += 1
    if not ok:
        sys.exit(f"FAIL {name} {detail}")
    print(f"PASS {name}" + (f" ({detail})" if detail else ""))


# bit strings
s = tp.BitString("010011")
check("bitstring roundtrip", str(s) == "010011" and len(s) == 6)
check("bitstring stride", str(s.stride(1, 2)) == "101")
check("bitstring search", tp.BitString("0011").find_occurrences(tp.BitString("10"), cyclic=True) == [3])

# de Bruijn pilots
p4 = tp.de_bruijn(4)
check("de bruijn order 4", len(p4) == 16 and tp.de_bruijn_verify(p4, 4))
check("de bruijn rejects impostor", not tp.de_bruijn_verify(tp.BitString("0101"), 2))

# closed forms
check("capacity", abs(tp.capacity(1.0) - math.exp(-1)) < 1e-12)
check("det capacity", tp.det_capacity(0.25) == 0.75)
check("converse limit", abs(tp.converse_bound(1.0, 10_000) - math.exp(-1)) < 1e-4)
rate, beta_star = tp.interleave_rate(1.0)
check("interleave rate", abs(rate - 0.0666) < 5e-4, f"rate={rate:.6f} beta*={beta_star:.4f}")
check("gamma=1 optimal", abs(tp.achievable_rate(0.5, 1.0) - tp.capacity(0.5)) < 1e-12)

# channel
x = tp.BitString.random(4096, seed=11)
fs = tp.shuffle(tp.tear(x, p=0.05, seed=7), seed=8)
check("tear partitions", fs.total_len() == 4096, f"K={fs.k()}")
c0, _ = tp.coverage(fs, 0.0, 4096)
check("coverage at gamma 0", c0 == 1.0)
c1, kept = tp.coverage(fs, 1.0, 4096)
check("coverage filters", all(l >= 12 for l in kept.lengths()), f"c1={c1:.3f}")

# pilot codec round trip
code = tp.CodeSpec.make(n=64, m=4, delta=0.0, catalog_size=8, seed=1)
check("code geometry", code.block_len == 16 and code.k_f == 12 and code.n_min == 48)
cw = code.encode([1, 2, 3])
check("encode pilot track", str(cw.stride(0, 4)) == str(code.pilot()))
report = code.decode(tp.FragmentSet.from_strings([str(cw)]))
check(
    "decode round trip",
    report["blocks"] == [1, 2, 3] and report["coverage_recovered"] == 1.0,
)
align = code.align(cw.substring(4, 48))
check("fragment alignment", align["status"] == "aligned" and align["start"] == 4)

# code file round trip
code2 = tp.CodeSpec.from_json(code.to_json())
check("code json roundtrip", str(code2.pilot()) == str(code.pilot()))

# codec soundness at scale
big = tp.CodeSpec.make(n=1 << 12, m=4, delta=0.1, catalog_size=8, seed=2)
sound = tp.soundness_experiment(big, p=0.02, trials=20, seed=9)
check("alignment soundness", sound["sound"] and sound["aligned"] > 0, f"aligned={sound['aligned']}")

# tiling decoder
check("tiles multiset", tp.tiles(tp.BitString("0000"), [tp.BitString("00"), tp.BitString("00")]))
check("tiles rejects", not tp.tiles(tp.BitString("0110"), [tp.BitString("01"), tp.BitString("01")]))
outcome = tp.tiling_decode([tp.BitString("0000"), tp.BitString("1111")],
                           tp.FragmentSet.from_strings(["00", "00"]), 0.0)
check("tiling decode", outcome == {"outcome": "decoded", "index": 0})

# Monte Carlo harness
lemmas = tp.verify_lemmas(n=1 << 16, alpha=1.0, trials=25, seed=5)
cov_row = next(r for r in lemmas["stats"] if r["statistic"] == "coverage_gamma_1")
check(
    "lemma coverage",
    abs(cov_row["estimate"] - 2 * math.exp(-1)) < 0.04,
    f"c1={cov_row['estimate']:.4f}",
)
oracle = tp.oracle_experiment(n=32, rate=0.1, alpha=1.0, gamma=1.0, trials=50, seed=6)
no_match = next(r for r in oracle["stats"] if r["statistic"] == "no_match_count")
check("oracle no-match never fires", no_match["estimate"] == 0.0)

print(f"\nall {checks} smoke checks passed")
