"""Alist text-format reader/writer tests."""

import numpy as np
import pytest

from blissdec import (
    CodeSpec,
    SparseParityCheckMatrix,
    generate_code,
    read_alist,
    write_alist,
)

from conftest import HAMMING_H

# The Hamming matrix in alist form, zero-padded to the maximum degrees the
# way fixed-width alist writers emit it.
PADDED_HAMMING = """\
7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2 0
1 3 0
2 3 0
1 2 3
1 0 0
2 0 0
3 0 0
1 2 4 5
1 3 4 6
2 3 4 7
"""


def test_roundtrip_hamming(tmp_path):
    h = SparseParityCheckMatrix.from_dense(np.array(HAMMING_H, dtype=np.uint8))
    path = tmp_path / "h.alist"
    write_alist(path, h)
    back = read_alist(path)
    assert np.array_equal(back.to_dense(), h.to_dense())


def test_roundtrip_generated_code(tmp_path):
    h = generate_code(CodeSpec(n=60, m=24, col_weight=3, seed=3))
    path = tmp_path / "code.alist"
    write_alist(path, h)
    back = read_alist(path)
    assert np.array_equal(back.to_dense(), h.to_dense())
    # writing the parsed matrix again is byte-identical
    path2 = tmp_path / "code2.alist"
    write_alist(path2, back)
    assert path.read_text() == path2.read_text()


def test_read_tolerates_zero_padding(tmp_path):
    path = tmp_path / "padded.alist"
    path.write_text(PADDED_HAMMING)
    h = read_alist(path)
    assert np.array_equal(h.to_dense(),
                          np.array(HAMMING_H, dtype=np.uint8))


def test_write_emits_unpadded_lines(tmp_path):
    h = SparseParityCheckMatrix.from_dense(np.array(HAMMING_H, dtype=np.uint8))
    path = tmp_path / "h.alist"
    write_alist(path, h)
    lines = path.read_text().splitlines()
    assert lines[0] == "7 3"
    assert lines[1] == "3 4"
    # column adjacency lines have exactly col_degree entries (no padding)
    col_deg = [int(x) for x in lines[2].split()]
    for i, d in enumerate(col_deg):
        assert len(lines[4 + i].split()) == d


def test_read_rejects_degree_mismatch(tmp_path):
    bad = PADDED_HAMMING.replace("4 4 4", "4 3 4")
    path = tmp_path / "bad.alist"
    path.write_text(bad)
    with pytest.raises(ValueError, match="row 1 lists"):
        read_alist(path)


def test_read_rejects_cross_reference_mismatch(tmp_path):
    # variable 1's column line claims checks {1,2}, but the row lines put
    # it in checks {1,3}
    bad = PADDED_HAMMING.replace("1 3 0", "1 2 0", 1)
    path = tmp_path / "bad.alist"
    path.write_text(bad)
    with pytest.raises(ValueError, match="inconsistent"):
        read_alist(path)


def test_read_rejects_truncated_and_malformed(tmp_path):
    path = tmp_path / "bad.alist"
    path.write_text("7 3\n3 4\n")
    with pytest.raises(ValueError, match="truncated"):
        read_alist(path)
    path.write_text("7\n3 4\n1 1 1 1 1 1 1\n3 3 3\n")
    with pytest.raises(ValueError, match="N M"):
        read_alist(path)
    path.write_text("0 3\n3 4\n1\n1\n")
    with pytest.raises(ValueError, match="bad dimensions"):
        read_alist(path)
    # wrong number of adjacency lines
    text = PADDED_HAMMING.splitlines()
    path.write_text("\n".join(text[:-1]) + "\n")
    with pytest.raises(ValueError, match="adjacency"):
        read_alist(path)


def test_read_ignores_blank_lines(tmp_path):
    spaced = PADDED_HAMMING.replace("4 4 4\n", "4 4 4\n\n")
    path = tmp_path / "spaced.alist"
    path.write_text(spaced)
    assert np.array_equal(read_alist(path).to_dense(),
                          np.array(HAMMING_H, dtype=np.uint8))
