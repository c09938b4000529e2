import json
import threading

import pytest

import pydepq


def test_list_depq_examples():
    d = pydepq.ListDepq()
    for k in (4, 2, 3):
        d.insert(k)
    assert d.extract_min() == 2
    assert d.extract_max() == 4
    assert d.extract_min() == 3
    assert d.extract_min() is None
    assert d.extract_max() is None
    assert d.audit() == ""


def test_list_depq_dump_marks_deleted():
    d = pydepq.ListDepq(batch_cap=8)
    for k in (1, 2, 3):
        d.insert(k)
    d.extract_min()
    assert [k for k, _ in d.dump("min")][-2:] == [2, 3]
    with pytest.raises(ValueError):
        d.dump("middle")


@pytest.mark.parametrize("kind", ["heap", "list"])
@pytest.mark.parametrize("mode", ["two-locks", "combining"])
def test_dual_matches_sequential_oracle(kind, mode):
    d = pydepq.DualDepq(kind=kind, mode=mode)
    ref = pydepq.SeqDepq()
    keys = [7, 1, 9, 1, 4, 12, 0, 5]
    for k in keys:
        d.insert(k)
        ref.insert(k)
    for i in range(len(keys) + 1):
        if i % 2:
            assert d.extract_max() == ref.extract_max()
        else:
            assert d.extract_min() == ref.extract_min()
    assert d.contents() == [] and len(ref) == 0
    assert d.name


def test_bad_arguments():
    with pytest.raises(ValueError):
        pydepq.DualDepq(kind="skiplist")
    with pytest.raises(Exception):
        pydepq.ListDepq(reclaim="hazard")


def test_threads_account_for_every_key():
    d = pydepq.ListDepq(reclaim="epoch")
    n = 2000
    got = [[], []]

    def producer(base):
        for i in range(n):
            d.insert(base + i)

    def consumer(slot, op):
        for _ in range(n):
            k = op()
            if k is not None:
                got[slot].append(k)

    ts = [threading.Thread(target=producer, args=(b,)) for b in (0, n)]
    ts += [threading.Thread(target=consumer, args=(0, d.extract_min)),
           threading.Thread(target=consumer, args=(1, d.extract_max))]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    returned = got[0] + got[1] + d.contents()
    assert sorted(returned) == list(range(2 * n))
    assert d.audit() == ""


def history(events):
    return "".join(json.dumps(e) + "\n" for e in events)


def event(kind, arg, result, invoke, response):
    return {"thread": 0, "kind": kind, "arg": arg, "result": result,
            "invoke": invoke, "response": response}


def test_check_history_verdicts():
    ok = history([
        event("Insert", 1, None, 0, 1),
        event("ExtractMin", None, 1, 2, 3),
        event("ExtractMax", None, "NONE", 4, 5),
    ])
    verdict, witness = pydepq.check_history(ok)
    assert verdict == "LINEARIZABLE"
    assert witness == [0, 1, 2]
    bad = history([
        event("Insert", 1, None, 0, 1),
        event("ExtractMin", None, 2, 2, 3),
    ])
    assert pydepq.check_history(bad)[0] == "NOT_LINEARIZABLE"


def test_replays():
    assert pydepq.replay("counterexample")["verdict"] == "NOT_LINEARIZABLE"
    twist = pydepq.replay("twist")
    assert twist["passed"]
    assert "(c) min [1* 2 3 4 5]  max [3* 4 2 1]" in twist["lines"]
    with pytest.raises(ValueError):
        pydepq.replay("unknown")


def test_bench_report():
    r = pydepq.bench(impl="dual-heap", threads_insert=2, ops=500, prefill=10)
    assert r["accounting"]["ok"] is True
    assert r["accounting"]["inserted"] == r["accounting"]["returned"] + r["accounting"]["remaining"]
    assert r["audit"] == "pass"
    assert r["impl"] == "dual-heap"
