"""Smoke test for the pynoet extension.

Build and install it first:

    pip install --no-build-isolation ./crates/python
"""

import json
import sys

import pynoet
from pynoet import Loop, NoetError, NotNoetherianError, Relation, Space, Value


def check(cond, what):
    if not cond:
        print(f"FAIL {what}")
        sys.exit(1)
    print(f"ok   {what}")


def main():
    ints = Space.int_range(0, 4)
    check(len(ints) == 5 and 3 in ints, "integer space")

    pred = Relation.from_pairs(ints, [(k, k - 1) for k in range(1, 5)])
    verdict = pred.is_noetherian()
    check(verdict["status"] == "noetherian", "predecessor is Noetherian")
    check(pred.height(4) == 4, "height of 4 is 4")
    check([v.as_int() for v in pred.minima()] == [0], "minimum is 0")
    check([str(v) for v in pred.limit_image(3)] == ["0"], "limit maps 3 to 0")
    check(pred.plus().classify()["order"], "plus is an order")
    check(len(pred.compose(pred)) == 3, "two steps down")
    check(pred.inverse().inverse().equals(pred), "inverse is an involution")

    cycle = Relation.from_pairs(Space.int_range(1, 2), [(1, 2), (2, 1)])
    loop_verdict = cycle.is_noetherian()
    check(loop_verdict["status"] == "not_noetherian", "cycle is not Noetherian")
    check(len(loop_verdict["witness"]) == 3, "cycle witness closes")
    try:
        cycle.limit()
        check(False, "limit of a cycle raises")
    except NotNoetherianError:
        check(True, "limit of a cycle raises")

    seed = Relation.from_pairs(ints, [(4, 0), (3, 0), (2, 0), (1, 0)])
    full = pred.plus()
    check(seed.is_seed_of(full), "shortcut relation is a seed of plus")
    check(seed.minima() == full.minima(), "seed keeps the minima")

    succ = Relation.catalog(json.dumps({"kind": "named", "name": "SUPINTERVAL", "lo": 1, "hi": 3}))
    check(succ.contains(Value("1..3"), Value("2..3")), "catalog SUPINTERVAL")
    back = Relation.from_json(succ.to_json())
    check(back.equals(succ), "relation JSON round trip")

    gcd = Loop.example("gcd", (12, 18))
    run = gcd.run((12, 18))
    check(run["terminal"] == {"pair": [{"int": 6}, {"int": 6}]}, "gcd(12, 18) = 6")
    check(gcd.verify()["passed"], "gcd loop verifies")

    search = Loop.example("general_search_interval", ([1, 3, 5, 7], 5), midpoint=True)
    terminals = [str(t) for t in search.terminals(([1, 3, 5, 7], 5))]
    check(terminals == ["3..3"], "binary search finds position 3")

    part = Loop.example("partition", [6, 2, 8, 4], pivot=5)
    check(part.verify()["passed"], "partition loop verifies")

    try:
        Value("(1,")
        check(False, "bad value text raises")
    except NoetError:
        check(True, "bad value text raises")

    findings = pynoet.run_audit(seed=0, samples=200)
    statuses = {(f["claim"], f["case"]): f["status"] for f in findings}
    check(statuses[("compose_noetherian", "fixture")] == "counterexample_found", "audit refutes composition")
    check(statuses[("limit_subset_theorem", "plus_closure")] == "validated_on_sample", "audit keeps plus closure")

    print("all checks passed")


if __name__ == "__main__":
    main()
