"""Degrees with a trivial quasi-homogeneous space, for all coprime types up to a bound."""
import argparse
from dataclasses import dataclass
from math import gcd

from qhflow.qhgrade import QHType, index_set_complement


@dataclass
class Config:
    max_t2: int = 5


def run(cfg: Config) -> dict:
    out = {}
    for t2 in range(1, cfg.max_t2 + 1):
        for t1 in range(1, t2 + 1):
            if gcd(t1, t2) == 1:
                out[(t1, t2)] = sorted(index_set_complement(QHType(t1, t2)))
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-t2", type=int, default=Config.max_t2)
    cfg = Config(ap.parse_args().max_t2)
    for t, s in run(cfg).items():
        print(f"t = {t}: {s if s else '{}'}")
