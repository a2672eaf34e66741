"""Quasi-cyclic LDPC baseline with single-flip hard-decision decoding."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse


class LdpcConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class QcLdpcCode:
    """Prototype of circulant shifts (-1 = zero block) expanded to ``H``."""

    prototype: np.ndarray
    circulant: int
    k_bits: int
    H: sparse.csr_matrix = field(repr=False, compare=False, default=None)
    _enc: tuple = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        p = np.asarray(self.prototype, dtype=np.int64)
        if p.ndim != 2 or np.any(p >= self.circulant) or np.any(p < -1):
            raise ValueError("prototype entries must lie in [-1, circulant)")
        object.__setattr__(self, "prototype", p)
        if self.H is None:
            object.__setattr__(self, "H", expand_prototype(p, self.circulant))
        if self._enc is None:
            object.__setattr__(self, "_enc", _systematic(self.H.toarray().astype(np.uint8)))
        rank = len(self._enc[0])
        if self.n_bits - rank < self.k_bits:
            raise LdpcConstructionError("code dimension smaller than k_bits")

    @property
    def n_bits(self) -> int:
        return self.prototype.shape[1] * self.circulant

    @property
    def n_checks(self) -> int:
        return self.prototype.shape[0] * self.circulant

    @property
    def rank(self) -> int:
        return len(self._enc[0])

    @property
    def column_weights(self) -> np.ndarray:
        return np.asarray(self.H.sum(axis=0)).ravel()

    @property
    def row_weights(self) -> np.ndarray:
        return np.asarray(self.H.sum(axis=1)).ravel()

    @property
    def info_positions(self) -> np.ndarray:
        return self._enc[1][: self.k_bits]


def expand_prototype(prototype, z: int) -> sparse.csr_matrix:
    rows, cols = [], []
    ar = np.arange(z)
    for (i, j), s in np.ndenumerate(prototype):
        if s < 0:
            continue
        # circulant: identity with columns cyclically shifted right by s
        rows.append(i * z + ar)
        cols.append(j * z + (ar + s) % z)
    r = np.concatenate(rows) if rows else np.array([], dtype=int)
    c = np.concatenate(cols) if cols else np.array([], dtype=int)
    shape = (prototype.shape[0] * z, prototype.shape[1] * z)
    return sparse.csr_matrix((np.ones(r.size, dtype=np.int32), (r, c)), shape=shape)


def _systematic(H):
    """GF(2) row reduction; returns (pivot columns, free columns, parity map).

    ``parity_map`` (rank x n_free) gives the pivot bits from the free bits:
    x[pivots] = parity_map @ x[free] mod 2.
    """
    A = H.copy()
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        hit = np.flatnonzero(A[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(c)
        r += 1
    pivots = np.array(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(n), pivots)
    parity_map = A[: len(pivots)][:, free]
    return pivots, free, parity_map


def construct_qc(n: int, k: int, circulant: int, seed: int = 0, column_weight: int = 3,
                 attempts: int = 200) -> QcLdpcCode:
    """Girth >= 6 QC code built greedily.

    Each block column gets ``column_weight`` nonzero circulants on the
    currently lightest block rows; shifts start array-code style (first
    nonzero block of a column unshifted when possible) and are otherwise
    drawn at random among values that close no 4-cycle.  Restarts with a
    derived seed on a dead end.
    """
    if n % circulant or (n - k) % circulant or not 0 < k < n:
        raise LdpcConstructionError(f"circulant {circulant} must divide N={n} and N-K={n - k}")
    J, L, z = (n - k) // circulant, n // circulant, circulant
    if column_weight > J:
        raise LdpcConstructionError(f"column weight {column_weight} exceeds {J} block rows")
    for attempt in range(attempts):
        rng = np.random.default_rng([seed, attempt])
        proto = _greedy_prototype(J, L, z, column_weight, rng)
        if proto is None:
            continue
        code = QcLdpcCode(proto, z, k)
        if code.rank == n - k or attempt == attempts - 1:
            return code
    raise LdpcConstructionError(f"no girth-6 prototype found in {attempts} attempts")


def _greedy_prototype(J, L, z, wc, rng):
    proto = -np.ones((J, L), dtype=np.int64)
    row_w = np.zeros(J)
    pair_w = np.zeros((J, J))
    diffs = [[set() for _ in range(J)] for _ in range(J)]
    for col in range(L):
        rows = []
        for _ in range(wc):
            cand = [r for r in range(J) if r not in rows]
            score = np.array([row_w[r] + sum(pair_w[r, q] for q in rows) for r in cand])
            score += rng.random(len(cand)) * 1e-3
            rows.append(cand[int(np.argmin(score))])
        rows.sort()
        shifts = []
        for i, r in enumerate(rows):
            options = [s for s in range(z)
                       if all((s - shifts[t]) % z not in diffs[r][rows[t]] for t in range(i))]
            if not options:
                return None
            shifts.append(0 if i == 0 and 0 in options else int(rng.choice(options)))
        for (a, sa), (b, sb) in itertools.combinations(zip(rows, shifts), 2):
            diffs[a][b].add((sa - sb) % z)
            diffs[b][a].add((sb - sa) % z)
            pair_w[a, b] += 1
            pair_w[b, a] += 1
        for r, s in zip(rows, shifts):
            proto[r, col] = s
            row_w[r] += 1
    return proto


def encode_ldpc(message, code: QcLdpcCode) -> np.ndarray:
    """Codeword(s) with the message on the first ``K`` free positions.

    Any free positions beyond ``K`` (rank-deficient ``H``) are set to 0.
    """
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1] != code.k_bits:
        raise ValueError(f"message length {msg.shape[-1]} != K = {code.k_bits}")
    pivots, free, pmap = code._enc
    x = np.zeros(msg.shape[:-1] + (code.n_bits,), dtype=np.uint8)
    x[..., free[: code.k_bits]] = msg
    xf = x[..., free].astype(np.int64)
    x[..., pivots] = (xf @ pmap.T.astype(np.int64)) % 2
    return x


def syndrome(x, code: QcLdpcCode) -> np.ndarray:
    xb = np.atleast_2d(np.asarray(x, dtype=np.int32))
    s = (code.H @ xb.T).T % 2
    return s[0] if np.ndim(x) == 1 else s


def bitflip_decode(hard_bits, code: QcLdpcCode, max_iter: int = 15):
    """Flip the single bit in the most unsatisfied checks each iteration.

    Returns ``(estimate, converged, iterations)``; arrays for a batch input.
    Ties go to the lowest bit index.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    x = np.atleast_2d(np.array(hard_bits, dtype=np.uint8, copy=True))
    B = x.shape[0]
    H = code.H
    Ht = H.T.tocsr()
    iters = np.zeros(B, dtype=np.int64)
    active = np.ones(B, dtype=bool)
    rows = np.arange(B)
    for _ in range(max_iter):
        s = (H @ x[active].T.astype(np.int32)).T % 2
        sat = s.sum(axis=1) == 0
        idx = rows[active]
        active[idx[sat]] = False
        if not active.any():
            break
        s = s[~sat]
        idx = idx[~sat]
        counts = (Ht @ s.T).T
        j = np.argmax(counts, axis=1)
        x[idx, j] ^= 1
        iters[idx] += 1
    s = (H @ x.T.astype(np.int32)).T % 2
    converged = s.sum(axis=1) == 0
    if np.ndim(hard_bits) == 1:
        return x[0], bool(converged[0]), int(iters[0])
    return x, converged, iters


def save_prototype(path, code: QcLdpcCode) -> None:
    lines = [f"# circulant={code.circulant} k_bits={code.k_bits}"]
    lines += [" ".join(str(int(v)) for v in row) for row in code.prototype]
    Path(path).write_text("\n".join(lines) + "\n")


def load_prototype(path, circulant: int | None = None, k_bits: int | None = None) -> QcLdpcCode:
    rows, meta = [], {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, val = tok.partition("=")
                meta[key] = int(val)
            continue
        rows.append([int(v) for v in line.split()])
    z = circulant if circulant is not None else meta["circulant"]
    proto = np.array(rows, dtype=np.int64)
    k = k_bits if k_bits is not None else meta.get("k_bits", (proto.shape[1] - proto.shape[0]) * z)
    return QcLdpcCode(proto, z, k)


def tanner_girth(H, limit: int = 12) -> int:
    """Shortest cycle length in the Tanner graph (``limit + 2`` if none up to ``limit``)."""
    H = sparse.csr_matrix(H)
    m, n = H.shape
    Hc = H.tocsc()
    var_nb = [Hc.indices[Hc.indptr[v]:Hc.indptr[v + 1]] for v in range(n)]
    chk_nb = [H.indices[H.indptr[c]:H.indptr[c + 1]] for c in range(m)]
    best = limit + 2
    # BFS from every variable node; nodes 0..n-1 variables, n.. checks
    for root in range(n):
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        while frontier:
            nxt = []
            for node in frontier:
                d = dist[node]
                if 2 * d + 1 >= best:
                    break
                nbrs = [n + c for c in var_nb[node]] if node < n else list(chk_nb[node - n])
                for nb in nbrs:
                    if nb == parent[node]:
                        continue
                    if nb in dist:
                        best = min(best, d + dist[nb] + 1)
                    else:
                        dist[nb] = d + 1
                        parent[nb] = node
                        nxt.append(nb)
            frontier = nxt
    return best
