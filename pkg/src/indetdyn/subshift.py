"""Countable-state subshift on the preimage tree, truncated with a REST state.

Explicit states are the tree nodes; every node beyond the truncation depth is
lumped into one REST state carrying the remaining weight.  In ``absorb`` mode
REST is a sink; in ``reinject`` mode REST feeds each explicit node exactly the
stationary mass flow of its missing preimages, so the lumped chain keeps the
stationary law on explicit states.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InadmissibleWord, RestEntered, WeightNotStabilized
from .numbers import format_fraction

REST = "REST"


def transition_degree(f, tree, p: int, q: int) -> int:
    """``d_{p,q}`` for tree node ids ``p, q``."""
    src = tree.nodes[p]
    maps_to_q = src.parent_id == q
    if not src.is_indeterminate:
        return src.edge_mult if maps_to_q else 0
    alpha = f.indeterminacy()[src.indet_index].alpha
    return alpha + src.edge_mult if maps_to_q else alpha


@dataclass
class SubshiftModel:
    node_ids: list               # explicit states (tree node ids)
    labels: list
    depth: list
    lam: list                    # Fractions, explicit states then REST
    rows: list                   # rows[i] = {j: Fraction}; index len(node_ids) is REST
    degrees: list                # degrees[i] = {j: int} for explicit j
    D: int
    rest_mode: str
    alphas: dict = field(default_factory=dict)   # explicit index -> alpha for indeterminacy states
    dprime: int = 1

    @property
    def n_explicit(self) -> int:
        return len(self.node_ids)

    @property
    def rest(self) -> int:
        return len(self.node_ids)

    def dense(self, as_float: bool = False):
        n = self.n_explicit + 1
        zero = 0.0 if as_float else Fraction(0)
        out = [[zero] * n for _ in range(n)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                out[i][j] = float(v) if as_float else v
        return out

    def triplets(self):
        return [(i, j, v) for i, row in enumerate(self.rows) for j, v in sorted(row.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        names = self.labels + [REST]
        wr.writerow(["state"] + names)
        for i, row in enumerate(self.dense()):
            wr.writerow([names[i]] + [format_fraction(x) for x in row])
        return buf.getvalue()

    def to_json(self):
        return {"states": self.labels + [REST], "depth": self.depth,
                "lambda": [format_fraction(x) for x in self.lam],
                "rest_mode": self.rest_mode, "D": self.D,
                "triplets": [[i, j, format_fraction(v)] for i, j, v in self.triplets()]}


def build_model(f, tree, table, rest_mode: str = "absorb", depth: int | None = None) -> SubshiftModel:
    """Transition matrix ``a_p^q = d_{p,q} lambda_q / (D lambda_p)`` on the nodes of
    depth <= ``depth`` (default: the whole tree) plus REST."""
    if rest_mode not in ("absorb", "reinject"):
        raise ValueError(f"unknown rest mode {rest_mode!r}")
    if table.limit is None or any(x is None for x in table.limit):
        raise WeightNotStabilized("limit weights unavailable")
    if depth is None:
        depth = tree.depth_max
    D = f.D
    keep = [nd.id for nd in tree.nodes if nd.depth <= depth]
    index = {nid: k for k, nid in enumerate(keep)}
    lam = [table.limit[nid] for nid in keep]
    if any(x <= 0 for x in lam):
        raise WeightNotStabilized("non-positive weight on an explicit state")
    lam_rest = 1 - sum(lam, Fraction(0))
    R = len(keep)
    rows, degs = [], []
    alphas = {}
    for i, nid in enumerate(keep):
        row, drow = {}, {}
        nd = tree.nodes[nid]
        if nd.is_indeterminate:
            alphas[i] = f.indeterminacy()[nd.indet_index].alpha
            for j, qid in enumerate(keep):
                dq = transition_degree(f, tree, nid, qid)
                if dq:
                    drow[j] = dq
                    row[j] = Fraction(dq) * lam[j] / (D * lam[i])
            leak = 1 - sum(row.values(), Fraction(0))
            if leak:
                row[R] = leak
        else:
            j = index[nd.parent_id]
            drow[j] = nd.edge_mult
            row[j] = Fraction(nd.edge_mult) * lam[j] / (D * lam[i])
        rows.append(row)
        degs.append(drow)
    rest_row = {}
    if rest_mode == "absorb" or lam_rest == 0:
        rest_row[R] = Fraction(1)
    else:
        for i, nid in enumerate(keep):
            explicit = sum(tree.nodes[c].edge_mult for c in keep
                           if tree.nodes[c].parent_id == nid)
            missing = f.dprime - explicit
            if missing:
                rest_row[i] = Fraction(missing) * lam[i] / (D * lam_rest)
        stay = 1 - sum(rest_row.values(), Fraction(0))
        if stay:
            rest_row[R] = stay
    rows.append(rest_row)
    labels = [tree.nodes[nid].point.label() for nid in keep]
    return SubshiftModel(keep, labels, [tree.nodes[nid].depth for nid in keep],
                         lam + [lam_rest], rows, degs, D, rest_mode, alphas, f.dprime)


def cylinder_measure(m: SubshiftModel, word) -> dict:
    """Both forms of the Markov measure of the cylinder ``[word]``."""
    if len(word) == 0:
        return {"product": Fraction(1), "degree_form": Fraction(1), "agree": True}
    for s in word:
        if not (0 <= s < m.n_explicit):
            raise InadmissibleWord(f"symbol {s!r} is not an explicit state")
    prod = m.lam[word[0]]
    dform = m.lam[word[-1]]
    for a, b in zip(word, word[1:]):
        d = m.degrees[a].get(b, 0)
        if d == 0:
            raise InadmissibleWord(f"transition {a} -> {b} has degree 0")
        prod *= m.rows[a][b]
        dform *= Fraction(d, m.D)
    return {"product": prod, "degree_form": dform, "agree": prod == dform}


def verify_invariance(m: SubshiftModel) -> dict:
    """Row sums and the identity ``sum_p lambda_p a_p^q = lambda_q``."""
    row_dev = max(abs(1 - sum(row.values(), Fraction(0))) for row in m.rows)
    col = [Fraction(0)] * (m.n_explicit + 1)
    for i, row in enumerate(m.rows):
        for j, v in row.items():
            col[j] += m.lam[i] * v
    devs = [abs(col[q] - m.lam[q]) for q in range(m.n_explicit)]
    worst = max(range(m.n_explicit), key=devs.__getitem__)
    eig_dev = devs[worst]
    leak = sum(m.lam[i] * m.rows[i].get(m.rest, 0) for i in range(m.n_explicit))
    return {"row_sum_dev": row_dev, "eigen_dev": eig_dev, "eigen_worst_state": m.labels[worst],
            "rest_dev": abs(col[m.rest] - m.lam[m.rest]),
            "rest_inflow": leak, "rest_mass": m.lam[m.rest]}


def transitivity_check(m: SubshiftModel, n_max: int | None = None) -> dict:
    """Least ``n`` with ``(A^n)_{p,q} > 0`` for every explicit pair.

    Also reports whether ``(A^{depth(p)+1})_{p,q} > 0`` for all ``q`` (the
    schedule through the indeterminacy point reached by descent) and the
    least ``n`` predicted by that schedule: ``k`` for the ``k``-th state on the
    descent chain of ``p``, ``depth(p)+1`` otherwise.
    """
    R = m.n_explicit
    if n_max is None:
        n_max = max(m.depth) + 2
    succ = [set(j for j, v in row.items() if v > 0) for row in m.rows]
    least = [[None] * (R + 1) for _ in range(R)]
    positive_at = [[set() for _ in range(R + 1)] for _ in range(R)]
    for p in range(R):
        cur = {p}
        for n in range(1, n_max + 1):
            cur = set().union(*(succ[x] for x in cur)) if cur else set()
            for q in cur:
                positive_at[p][q].add(n)
                if least[p][q] is None:
                    least[p][q] = n
    schedule_ok = all(m.depth[p] + 1 in positive_at[p][q] for p in range(R) for q in range(R))
    predicted = [[None] * R for _ in range(R)]
    for p in range(R):
        chain, x = [], p
        for k in range(1, m.depth[p] + 1):
            nxt = [j for j in succ[x] if j != R]
            x = nxt[0]
            chain.append(x)
        for q in range(R):
            predicted[p][q] = chain.index(q) + 1 if q in chain else m.depth[p] + 1
    matches = all(least[p][q] == predicted[p][q] for p in range(R) for q in range(R))
    return {"least_n": [row[:R] for row in least], "rest_least_n": [row[R] for row in least],
            "all_reachable": all(least[p][q] is not None for p in range(R) for q in range(R)),
            "schedule_ok": schedule_ok, "predicted": predicted, "matches_schedule": matches}


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for ``(seed, stream)`` via SeedSequence spawning."""
    ss = np.random.SeedSequence(seed)
    child = ss.spawn(stream + 1)[stream]
    return np.random.Generator(np.random.PCG64(child))


RNG_DOC = "numpy PCG64 seeded by SeedSequence(seed).spawn(stream + 1)[stream]"


def _cum_matrix(m: SubshiftModel):
    A = np.array(m.dense(as_float=True))
    cum = np.cumsum(A, axis=1)
    cum[:, -1] = np.maximum(cum[:, -1], 1.0)
    return A, cum


def sample_itinerary(m: SubshiftModel, length: int, seed: int, on_rest: str = "resample",
                     stream: int = 0):
    """A nu-distributed word over explicit states.

    ``on_rest``: ``resample`` redraws a step that lands on REST from the
    explicit part of the row; ``terminate`` stops the word there; ``raise``
    raises :class:`RestEntered`.
    """
    if length == 0:
        return []
    rng = rng_for(seed, stream)
    A, _ = _cum_matrix(m)
    R = m.n_explicit
    init = np.array([float(x) for x in m.lam[:R]])
    init /= init.sum()
    word = [int(rng.choice(R, p=init))]
    while len(word) < length:
        row = A[word[-1]]
        nxt = int(rng.choice(R + 1, p=row / row.sum()))
        if nxt == R:
            if on_rest == "raise":
                raise RestEntered(f"REST entered after {len(word)} symbols")
            if on_rest == "terminate":
                break
            ex = row[:R]
            nxt = int(rng.choice(R, p=ex / ex.sum()))
        word.append(nxt)
    return word


def sample_words(m: SubshiftModel, n_words: int, length: int, seed: int, stream: int = 0,
                 include_rest: bool = True):
    """Vectorized words from the lumped chain (REST kept as a state).

    The initial law is the full weight vector including REST, so the chain
    starts stationary.  Returns an ``(n_words, length)`` int array.
    """
    rng = rng_for(seed, stream)
    A, cum = _cum_matrix(m)
    S = A.shape[0]
    init = np.array([float(x) for x in m.lam])
    if not include_rest:
        init[-1] = 0.0
    init /= init.sum()
    out = np.empty((n_words, length), dtype=np.int64)
    out[:, 0] = np.minimum(np.searchsorted(np.cumsum(init), rng.random(n_words), side="right"), S - 1)
    for t in range(1, length):
        u = rng.random(n_words)
        out[:, t] = np.minimum((u[:, None] >= cum[out[:, t - 1]]).sum(axis=1), S - 1)
    return out


def words_to_csv(m: SubshiftModel, words) -> str:
    names = m.labels + [REST]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["word_id", "word"])
    for k, w in enumerate(words):
        wr.writerow([k, " ".join(names[s] for s in w)])
    return buf.getvalue()
