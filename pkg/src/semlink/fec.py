"""Rate-1/2 LDPC code: seeded regular construction, encoder, BP decoder.

The code is a regular (3,6) bipartite graph built deterministically from a
seed by socket matching, with duplicate-edge repair and best-effort
4-cycle reduction.  A systematic generator is derived by GF(2) elimination
with the column permutation recorded.

LLR sign convention, used everywhere in this package: positive means bit 0
is the more likely value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VAR_DEGREE = 3
CHECK_DEGREE = 6

MSG_CLIP = 30.0  # saturates tanh well before float issues
TANH_CLIP = 1.0 - 1e-12
MIN_SUM_OFFSET = 0.15


@dataclass
class LdpcCode:
    """Immutable code object; safe to share across parallel trials."""

    n: int
    k: int
    parity_check: np.ndarray  # (m, n) uint8
    construction_seed: int
    column_permutation: np.ndarray  # parity_check[:, perm] row-reduces to [B | I]
    parity_block: np.ndarray  # B, (m, k) uint8
    info_positions: np.ndarray  # original column index of each info bit
    _edge_var: np.ndarray = field(repr=False, default=None)
    _check_edges: np.ndarray = field(repr=False, default=None)
    _var_edges: np.ndarray = field(repr=False, default=None)
    _check_vars: np.ndarray = field(repr=False, default=None)
    _parity_f32: np.ndarray = field(repr=False, default=None)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def generator_matrix(self) -> np.ndarray:
        """Explicit systematic generator G with G @ H.T == 0 over GF(2)."""
        m = self.n - self.k
        g_perm = np.concatenate(
            [np.eye(self.k, dtype=np.uint8), self.parity_block.T], axis=1
        )
        g = np.zeros((self.k, self.n), dtype=np.uint8)
        g[:, self.column_permutation] = g_perm
        return g


def _match_sockets(n: int, m: int, rng: np.random.Generator):
    """Random socket matching repaired into a simple bipartite graph."""
    edge_var = np.repeat(np.arange(n), VAR_DEGREE)
    edge_check = np.repeat(np.arange(m), CHECK_DEGREE)
    rng.shuffle(edge_check)
    for _ in range(400):
        keys = edge_var.astype(np.int64) * m + edge_check
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        dup = np.zeros(len(sorted_keys), dtype=bool)
        dup[1:] = sorted_keys[1:] == sorted_keys[:-1]
        dup_sockets = order[dup]
        if dup_sockets.size == 0:
            return edge_var, edge_check
        partners = rng.integers(0, len(edge_check), size=dup_sockets.size)
        for s, t in zip(dup_sockets, partners):
            edge_check[s], edge_check[t] = edge_check[t], edge_check[s]
    return None


def _reduce_four_cycles(
    edge_var: np.ndarray, edge_check: np.ndarray, m: int, rng: np.random.Generator,
    passes: int = 30,
) -> None:
    """Swap edges to break length-4 cycles; best-effort, in place."""
    num_edges = len(edge_var)
    for _ in range(passes):
        by_check: list[list[int]] = [[] for _ in range(m)]
        for e in range(num_edges):
            by_check[edge_check[e]].append(e)
        seen: set[tuple[int, int]] = set()
        offenders: list[int] = []
        for edges in by_check:
            variables = [edge_var[e] for e in edges]
            for i in range(len(edges)):
                for j in range(i + 1, len(edges)):
                    a, b = variables[i], variables[j]
                    key = (a, b) if a < b else (b, a)
                    if key in seen:
                        offenders.append(edges[j])
                    else:
                        seen.add(key)
        if not offenders:
            return
        edge_set = set(zip(edge_var.tolist(), edge_check.tolist()))
        moved = False
        for e in offenders:
            for _ in range(20):
                t = int(rng.integers(0, num_edges))
                v1, c1 = int(edge_var[e]), int(edge_check[e])
                v2, c2 = int(edge_var[t]), int(edge_check[t])
                if t == e or c1 == c2 or v1 == v2:
                    continue
                if (v1, c2) in edge_set or (v2, c1) in edge_set:
                    continue
                edge_set.discard((v1, c1))
                edge_set.discard((v2, c2))
                edge_set.add((v1, c2))
                edge_set.add((v2, c1))
                edge_check[e], edge_check[t] = c2, c1
                moved = True
                break
        if not moved:
            return


class _RankDeficient(Exception):
    pass


def _gf2_rref(mat: np.ndarray):
    h = mat.copy()
    m, n = h.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(h[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + nz[0]
        if p != row:
            h[[row, p]] = h[[p, row]]
        others = np.nonzero(h[:, col])[0]
        others = others[others != row]
        if others.size:
            h[others] ^= h[row]
        pivots.append(col)
        row += 1
    return h, pivots


def build_code(n: int, seed: int) -> LdpcCode:
    """Deterministic (3,6)-regular rate-1/2 code for even n >= 8."""
    if n % 2 != 0 or n < 8:
        raise ValueError("codeword length must be even and at least 8")
    m = n // 2
    for sub_seed in range(16):
        rng = np.random.default_rng([int(seed), sub_seed, 0x1D9C])
        matched = _match_sockets(n, m, rng)
        if matched is None:
            continue
        edge_var, edge_check = matched
        _reduce_four_cycles(edge_var, edge_check, m, rng)

        parity_check = np.zeros((m, n), dtype=np.uint8)
        parity_check[edge_check, edge_var] = 1

        rref, pivots = _gf2_rref(parity_check)
        if len(pivots) < m:
            continue  # rank-deficient draw; retry with the next sub-seed
        pivot_cols = np.array(pivots)
        non_pivot_cols = np.setdiff1d(np.arange(n), pivot_cols)
        perm = np.concatenate([non_pivot_cols, pivot_cols])
        parity_block = rref[:, non_pivot_cols].astype(np.uint8)

        order = np.lexsort((edge_check, edge_var))
        ev = edge_var[order]
        ec = edge_check[order]
        var_edges = np.arange(len(ev)).reshape(n, VAR_DEGREE)
        check_order = np.argsort(ec, kind="stable")
        check_edges = check_order.reshape(m, CHECK_DEGREE)
        check_vars = ev[check_edges]

        return LdpcCode(
            n=n,
            k=n - m,
            parity_check=parity_check,
            construction_seed=seed,
            column_permutation=perm,
            parity_block=parity_block,
            info_positions=perm[: n - m].copy(),
            _edge_var=ev,
            _check_edges=check_edges,
            _var_edges=var_edges,
            _check_vars=check_vars,
            _parity_f32=parity_block.astype(np.float32),
        )
    raise RuntimeError(
        f"could not build a full-rank (3,6) code for n={n}, seed={seed} in 16 attempts"
    )


def encode(code: LdpcCode, info_bits: np.ndarray) -> np.ndarray:
    """Systematic encoding; the output always satisfies every parity check."""
    info = np.asarray(info_bits, dtype=np.uint8)
    if info.shape != (code.k,):
        raise ValueError(f"expected {code.k} info bits, got shape {info.shape}")
    return encode_batch(code, info[None, :])[0]


def encode_batch(code: LdpcCode, info_bits: np.ndarray) -> np.ndarray:
    info = np.asarray(info_bits, dtype=np.uint8)
    if info.ndim != 2 or info.shape[1] != code.k:
        raise ValueError(f"expected shape (batch, {code.k}), got {info.shape}")
    parity = (info.astype(np.float32) @ code._parity_f32.T) % 2
    cw_perm = np.concatenate([info, parity.astype(np.uint8)], axis=1)
    out = np.empty_like(cw_perm)
    out[:, code.column_permutation] = cw_perm
    return out


def syndrome(code: LdpcCode, codeword: np.ndarray) -> np.ndarray:
    word = np.atleast_2d(np.asarray(codeword, dtype=np.uint8))
    return word[:, code._check_vars].sum(axis=2) % 2


def _loo_product(a: np.ndarray) -> np.ndarray:
    ones = np.ones_like(a[..., :1])
    prefix = np.concatenate([ones, np.cumprod(a, axis=-1)[..., :-1]], axis=-1)
    rev = a[..., ::-1]
    suffix_rev = np.concatenate([ones, np.cumprod(rev, axis=-1)[..., :-1]], axis=-1)
    return prefix * suffix_rev[..., ::-1]


def _loo_min(a: np.ndarray) -> np.ndarray:
    big = np.full_like(a[..., :1], np.inf)
    prefix = np.concatenate(
        [big, np.minimum.accumulate(a, axis=-1)[..., :-1]], axis=-1
    )
    rev = a[..., ::-1]
    suffix_rev = np.concatenate(
        [big, np.minimum.accumulate(rev, axis=-1)[..., :-1]], axis=-1
    )
    return np.minimum(prefix, suffix_rev[..., ::-1])


def decode(
    code: LdpcCode,
    llrs: np.ndarray,
    max_iters: int = 20,
    min_sum: bool = False,
) -> tuple[np.ndarray, bool]:
    """Belief-propagation decoding of one codeword's LLRs.

    Returns the systematic info bits and a convergence flag.  Convergence
    means the hard decision satisfied every parity check while the
    posteriors carried actual information (all-zero input LLRs never
    converge).
    """
    llr = np.asarray(llrs, dtype=np.float64)
    if llr.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llr.shape}")
    info, converged, _ = decode_batch(code, llr[None, :], max_iters, min_sum)
    return info[0], bool(converged[0])


def decode_batch(
    code: LdpcCode,
    llrs: np.ndarray,
    max_iters: int = 20,
    min_sum: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized BP over a batch of codewords.

    Returns (info_bits (B, k), converged (B,), iterations (B,)).
    """
    llr = np.asarray(llrs, dtype=np.float64)
    if llr.ndim != 2 or llr.shape[1] != code.n:
        raise ValueError(f"expected shape (batch, {code.n}), got {llr.shape}")
    if not np.all(np.isfinite(llr)):
        raise ValueError("LLRs must be finite")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")

    batch = llr.shape[0]
    ce = code._check_edges
    ve = code._var_edges
    edge_var = code._edge_var

    msg_vc = llr[:, edge_var]
    msg_cv = np.zeros_like(msg_vc)
    result = np.zeros((batch, code.n), dtype=np.uint8)
    done = np.zeros(batch, dtype=bool)
    iterations = np.full(batch, max_iters, dtype=np.int64)
    hard = result

    for iteration in range(1, max_iters + 1):
        grouped = np.clip(msg_vc, -MSG_CLIP, MSG_CLIP)[:, ce]
        if min_sum:
            signs = np.where(grouped < 0, -1.0, 1.0) * (grouped != 0)
            magnitude = np.maximum(_loo_min(np.abs(grouped)) - MIN_SUM_OFFSET, 0.0)
            cv_grouped = _loo_product(signs) * magnitude
        else:
            t = np.tanh(grouped / 2.0)
            loo = np.clip(_loo_product(t), -TANH_CLIP, TANH_CLIP)
            cv_grouped = 2.0 * np.arctanh(loo)
        msg_cv[:, ce.reshape(-1)] = cv_grouped.reshape(batch, -1)

        posterior = llr + msg_cv[:, ve].sum(axis=2)
        hard = (posterior < 0).astype(np.uint8)

        parity = hard[:, code._check_vars].sum(axis=2) % 2
        syndrome_ok = ~np.any(parity, axis=1)
        informative = np.any(posterior != 0.0, axis=1)
        newly = syndrome_ok & informative & ~done
        if np.any(newly):
            result[newly] = hard[newly]
            iterations[newly] = iteration
            done |= newly
        if done.all():
            break
        msg_vc = posterior[:, edge_var] - msg_cv

    result[~done] = hard[~done]
    info = result[:, code.info_positions]
    return info, done, iterations


def to_alist(code: LdpcCode) -> str:
    """Parity-check matrix in the MacKay alist text format (1-indexed)."""
    h = code.parity_check
    m, n = h.shape
    col_deg = h.sum(axis=0)
    row_deg = h.sum(axis=1)
    lines = [
        f"{n} {m}",
        f"{col_deg.max()} {row_deg.max()}",
        " ".join(str(int(d)) for d in col_deg),
        " ".join(str(int(d)) for d in row_deg),
    ]
    for j in range(n):
        lines.append(" ".join(str(int(i) + 1) for i in np.nonzero(h[:, j])[0]))
    for i in range(m):
        lines.append(" ".join(str(int(j) + 1) for j in np.nonzero(h[i, :])[0]))
    return "\n".join(lines) + "\n"
