#!/usr/bin/env python3
"""Regenerate the golden tables under src/padic_rmt/golden/hl/.

Run deliberately after an intended change to the exact engine; the
selftest and the test suite compare against these files byte for byte.
"""

import json
from fractions import Fraction
from pathlib import Path

from padic_rmt.hall_littlewood import (
    corner_distribution,
    hl_haar_corner_measure,
    verify_corner_inequality,
)
from padic_rmt.padic import Signature

OUT = Path(__file__).resolve().parent.parent / "src" / "padic_rmt" / "golden" / "hl"


def write(name: str, obj: dict) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / name
    path.write_text(json.dumps(obj, indent=2) + "\n")
    print(f"wrote {path}")


def main() -> None:
    dist = corner_distribution(Signature((1, 0)), Fraction(1, 2))
    write(
        "corner_dist_1_0_p2.json",
        {"signature": [1, 0], "p": 2, "entries": dist.to_json_entries()},
    )
    dist = corner_distribution(Signature((1, 0, 0)), Fraction(1, 2))
    write(
        "corner_dist_1_0_0_p2.json",
        {"signature": [1, 0, 0], "p": 2, "entries": dist.to_json_entries()},
    )
    gaps_entries = []
    for parts in ((1, 0), (2, 1, 0), (1, 1, 0)):
        for p in (2, 3):
            lam = Signature(parts)
            report = verify_corner_inequality({lam: Fraction(1)}, Fraction(1, p))
            gaps_entries.append(
                {
                    "signature": list(parts),
                    "p": p,
                    "gaps": [str(g) for g in report.gaps],
                }
            )
    write("corner_gaps.json", {"entries": gaps_entries})
    measure = hl_haar_corner_measure(2, 2, 3, 2)
    write(
        "haar_corner_2_2_3_p2.json",
        {
            "n": 2,
            "m": 2,
            "ambient": 3,
            "p": 2,
            "total_mass": str(measure.total),
            "entries": measure.to_json_entries(),
        },
    )


if __name__ == "__main__":
    main()
