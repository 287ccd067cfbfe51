"""Smoke test for the Python bindings.

Build and place the extension next to this file first:

    cargo build --release -p bwtlcp-py --features extension-module
    cp target/release/libbwtlcp_py.so python/bwtlcp.so
"""

import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import bwtlcp  # noqa: E402


def main():
    acgt = bwtlcp.Alphabet("ACGT")
    assert acgt.sigma == 4

    c = bwtlcp.SequenceCollection(["ACACTGTACCAAC", "GAACAGAAAGCTC"], acgt)
    assert (len(c), c.max_len, c.total_len) == (2, 13, 28)

    out = bwtlcp.build(c, emit_gsa=True)
    assert out.bwt == "CC" + "GCGAA$ATCCA" + "ATCAAAGA" + "A$AT" + "GCC", out.bwt
    assert out.lcp[2:13] == [0, 2, 3, 2, 1, 2, 3, 2, 2, 1, 2]
    ref = bwtlcp.oracle_build(c)
    assert (out.bwt, out.lcp, out.gsa) == (ref.bwt, ref.lcp, ref.gsa)

    pair = bwtlcp.build(bwtlcp.SequenceCollection(["AA", "AC"]), emit_gsa=True)
    assert pair.bwt == "ACA$$A"
    assert pair.gsa == [(2, 0), (2, 1), (1, 0), (0, 0), (0, 1), (1, 1)]

    seg = "ATCAAAGA"
    lcp = [0, 1, 1, 2, 2, 1, 1, 2]
    cur = bwtlcp.lci(acgt, seg, lcp, "A", 4)
    assert (cur.start, cur.end, cur.min, cur.extended_lcp) == (1, 4, 1, 2)
    nxt = bwtlcp.lsi(acgt, seg, lcp, "A", 4)
    assert (nxt.start, nxt.end, nxt.min, nxt.extended_lcp) == (4, 5, 2, 3)

    try:
        bwtlcp.SequenceCollection(["ACGT", ""])
    except ValueError:
        pass
    else:
        raise AssertionError("empty string accepted")

    with tempfile.TemporaryDirectory() as d:
        a, b = os.path.join(d, "a.txt"), os.path.join(d, "b.txt")
        bwtlcp.synth(1, 4, 5, 4, a)
        bwtlcp.synth(1, 4, 5, 4, b)
        assert open(a).read() == open(b).read()
        code = bwtlcp.main(["--input", a, "--verify", "-o", os.path.join(d, "out"), "--tmp-dir", d])
        assert code == 0
        assert os.path.getsize(os.path.join(d, "out.bwt")) == 24

    print("python smoke test passed")


if __name__ == "__main__":
    main()
