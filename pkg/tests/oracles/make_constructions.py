"""Golden traces for the constructed points.

The Cantor prefix is produced by the package generator (its digits are what
gets frozen); every Birkhoff sum recorded here comes from a plain Python scan
of those digits, not from the package's summation code.  The zero-block
stream is rebuilt from its definition without the package at all.
Writes tests/golden/constructions.json.  Run from the repository root.
"""

import hashlib
import json
import math
from pathlib import Path

CANTOR = {"psi": "n^2", "beta": 1.0, "m": 16, "seed": 20240607, "digits": 100000}
INF_GAMMA = 0.6


def scan_sums(word, upto):
    """S_n for n = 1..upto by walking the digits (phi = 2**run of zeros)."""
    out, total = [], 0
    for j in range(upto):
        r = 0
        while word[j + r] == "0":
            r += 1
        total += 1 << r
        out.append(total)
    return out


def cantor_golden():
    from stpetersburg.constructions import build_cantor
    from stpetersburg.growth import parse_psi

    c = build_cantor(parse_psi(CANTOR["psi"]), CANTOR["beta"], CANTOR["m"], "seeded",
                     CANTOR["seed"])
    N = CANTOR["digits"]
    levels = c.schedule.levels_through(N)
    last = levels[-1].N
    word = c.stream.prefix(N + 64)
    assert "1" in word[last - 1:]
    sums = scan_sums(word, last)
    tail = [{"k": lv.k, "N_k": lv.N, "S": str(sums[lv.N - 1]),
             "ratio": sums[lv.N - 1] / lv.N ** 2} for lv in levels[-5:]]
    return {**CANTOR, "k0": c.schedule.k0, "levels": len(levels),
            "sha256": hashlib.sha256(word[:N].encode()).hexdigest(), "last5": tail}


def infinity_golden():
    delta = (INF_GAMMA + 1) / 2
    top = 17
    length = (1 << top) + 1
    digits = ["1"] * (length + 1)
    for k in range(1, top):
        for pos in range((1 << k) + 1, (1 << k) + math.floor(2 ** (k * delta)) + 1):
            digits[pos - 1] = "0"
    word = "".join(digits)
    rows = []
    for k in range(8, top):
        n = (1 << k) + math.floor(2 ** (k * delta)) + 1
        S = scan_sums(word, n)[-1]
        rows.append({"k": k, "n": n, "S_bits": S.bit_length(),
                     "log2_S_minus_psi": math.log2(S) - n ** INF_GAMMA})
    forced = 0
    N = 1 << 20
    k = 1
    while (1 << k) + 1 <= N:
        hi = (1 << k) + math.floor(2 ** (k * delta))
        forced += min(hi, N) - (1 << k)
        k += 1
    return {"gamma": INF_GAMMA, "delta": delta, "rows": rows,
            "sha256_4096": hashlib.sha256(word[:4096].encode()).hexdigest(),
            "constrained_2_20": forced}


def main():
    out = {"cantor": cantor_golden(), "infinity": infinity_golden()}
    path = Path(__file__).resolve().parents[1] / "golden" / "constructions.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
