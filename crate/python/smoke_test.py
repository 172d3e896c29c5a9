"""Smoke test for the boundrec_py extension."""

import json
from fractions import Fraction

import boundrec_py as br


def main():
    o = br.Oracle("101")
    assert len(o) == 3 and o.query(1) and not o.query(2)
    num, den = o.coin_bias()
    assert 0 < Fraction(num, den) < 1

    member = "0 1 0^2 1 0^4 1 0^8 1 0^16 1^2 0^32 1^2 0^64"
    assert br.membership("DIMA", member)
    assert not br.membership("DIMA", "0 1 0^3")
    assert br.membership("UPOWER64", "n=4096")
    assert br.least_non_divisor(12) == 5

    members = br.enumerate("DIMA", 2)
    assert members and all(br.membership("DIMA", m) for m in members)
    assert all(not br.membership("DIMA", m) for m in br.mutate("DIMA", members[0], 5))

    num, den = br.extraction_error(o, 1)
    assert Fraction(num, den) <= Fraction(1, 4)
    p_in, p_out = br.adh(o, 1)
    assert abs(p_in + p_out - 1) < 1e-12 and p_out > 0.98

    out = json.loads(br.rtqcfa("a b a^7 b"))
    assert "round" in out and "overall" in out

    a = json.loads(br.run("dima-i-pca2", member, oracle=o, seed=7))
    b = json.loads(br.run("dima-i-pca2", member, oracle=o, seed=7))
    assert a == b

    cfg = json.dumps({"kind": "recognize", "recognizer": "dima-dca2", "inputs": ["0 1 0^2", "1"]})
    text, code = br.run_experiment(cfg)
    report = json.loads(text)
    assert code == 0 and report["summary"]["disagreements"] == 0

    lo, hi = br.wilson(50, 100)
    assert lo < 0.5 < hi
    print("boundrec_py", br.__version__, "ok")


if __name__ == "__main__":
    main()
