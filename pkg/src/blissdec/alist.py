"""Reader/writer for the standard alist sparse-matrix text format.

Layout: first line ``N M``, second line ``max_col_degree max_row_degree``,
then the N column degrees, the M row degrees, then one line per column
listing its 1-based check indices and one line per row listing its 1-based
variable indices.  Zero padding of the adjacency lines (fixed-width files)
is tolerated on read and not emitted on write.
"""

from __future__ import annotations

from pathlib import Path

from .ldpc import SparseParityCheckMatrix


def read_alist(path: str | Path) -> SparseParityCheckMatrix:
    """Parse an alist file into a :class:`SparseParityCheckMatrix`."""
    text = Path(path).read_text()
    fields: list[list[int]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line:
            fields.append([int(tok) for tok in line.split()])
    if len(fields) < 4:
        raise ValueError(f"{path}: truncated alist header")
    if len(fields[0]) != 2:
        raise ValueError(f"{path}: first line must be 'N M'")
    n, m = fields[0]
    if n <= 0 or m <= 0:
        raise ValueError(f"{path}: bad dimensions N={n}, M={m}")
    col_deg = fields[2]
    row_deg = fields[3]
    if len(col_deg) != n or len(row_deg) != m:
        raise ValueError(f"{path}: degree lines do not match N/M")
    body = fields[4:]
    if len(body) != n + m:
        raise ValueError(f"{path}: expected {n + m} adjacency lines, "
                         f"got {len(body)}")
    rows = []
    for m_i in range(m):
        entries = [x for x in body[n + m_i] if x != 0]
        if len(entries) != row_deg[m_i]:
            raise ValueError(f"{path}: row {m_i} lists {len(entries)} entries, "
                             f"degree says {row_deg[m_i]}")
        rows.append([x - 1 for x in entries])
    h = SparseParityCheckMatrix(n, rows)
    # Cross-check the column part of the file against the row part.
    for n_i in range(n):
        entries = sorted(x - 1 for x in body[n_i] if x != 0)
        if entries != sorted(h.cols(n_i).tolist()):
            raise ValueError(f"{path}: column {n_i} inconsistent with rows")
    return h


def write_alist(path: str | Path, h: SparseParityCheckMatrix) -> None:
    """Write ``h`` in alist format (unpadded adjacency lines)."""
    lines = [f"{h.n_vars} {h.n_checks}"]
    col_deg = h.col_degrees()
    row_deg = h.row_degrees()
    lines.append(f"{int(col_deg.max())} {int(row_deg.max())}")
    lines.append(" ".join(str(int(d)) for d in col_deg))
    lines.append(" ".join(str(int(d)) for d in row_deg))
    for n in range(h.n_vars):
        lines.append(" ".join(str(int(m) + 1) for m in h.cols(n)))
    for m in range(h.n_checks):
        lines.append(" ".join(str(int(n) + 1) for n in h.rows(m)))
    Path(path).write_text("\n".join(lines) + "\n")
