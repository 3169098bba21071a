"""Naive re-derivations of every pipeline score, used as test oracles.

Everything here is written from the definitions with plain loops and
Counters: enumerate records, form probabilities, apply the normalized-PMI
formula.  No code is shared with the vectorized production path.
"""
import math
from collections import Counter, defaultdict

from emlang.env import ObservationKind

NAMED = (-2, -1, 1, 2)

PIECES = {
    (1, 1): ((2, 3),),
    (2, 1): ((1,), (3,)),
    (3, 1): ((1, 2),),
    (1, 2): ((3,),),
    (2, 2): ((1,),),
}


def ref_npmi(p_joint, p_a, p_b):
    return math.log2(p_joint / (p_a * p_b)) / -math.log2(p_joint)


def ref_integer_prior(top_n, num_points):
    if top_n == 1:
        return 1.0 / num_points
    total = math.comb(num_points, 4)
    return (total - math.comb(num_points - top_n, 4)) / total


def visible_named(record):
    mask = record.obs.index(-1)
    return {
        j - mask: v
        for j, v in enumerate(record.obs)
        if j != mask and (j - mask) in NAMED
    }


def visible_all(record):
    mask = record.obs.index(-1)
    return [v for j, v in enumerate(record.obs) if j != mask]


def occurrences(message):
    m = message
    return [
        ((m[0],), 1),
        ((m[1],), 2),
        ((m[2],), 3),
        ((m[0], m[1]), 1),
        ((m[1], m[2]), 2),
    ]


def nc_scores(records, max_rank=1):
    """(msg, kind) and (msg, offset, integer) NPMI, by direct enumeration."""
    L = len(records)
    n = len(records[0].seq)
    msg_counts = Counter(r.message for r in records)
    kind_counts = Counter(r.obs_kind for r in records)
    joint_kind = Counter()
    joint_int = defaultdict(Counter)
    for r in records:
        if r.obs_kind is not ObservationKind.MIDDLE:
            joint_kind[(r.message, r.obs_kind)] += 1
        for off, v in visible_named(r).items():
            joint_int[r.message][(off, v)] += 1
    kind_out = {}
    for (msg, kind), j in joint_kind.items():
        kind_out[(msg, kind.value)] = ref_npmi(
            j / L, msg_counts[msg] / L, kind_counts[kind] / L
        )
    int_out = {}
    for msg, ctr in joint_int.items():
        p_msg = msg_counts[msg] / L
        ranked = sorted(ctr.items(), key=lambda kv: (-kv[1], kv[0][1], kv[0][0]))
        for rank, ((off, v), j) in enumerate(ranked[:max_rank], start=1):
            int_out[(msg, off, v)] = (
                ref_npmi(j / L, p_msg, ref_integer_prior(rank, n)),
                rank,
            )
    return kind_out, int_out


def c_scores(records, max_rank=1):
    """(ngram, slot|None, integer) NPMI, by direct enumeration."""
    L = len(records)
    n = len(records[0].seq)
    sub_counts = Counter()
    joints = defaultdict(Counter)
    for r in records:
        vis = visible_all(r)
        for sym, slot in occurrences(r.message):
            sub_counts[(sym, slot)] += 1
            sub_counts[(sym, None)] += 1
            for v in vis:
                joints[(sym, slot)][v] += 1
                joints[(sym, None)][v] += 1
    out = {}
    for (sym, slot), ctr in joints.items():
        count = sub_counts[(sym, slot)]
        if slot is None:
            p_sub = count / (L * (4 - len(sym)))
        else:
            p_sub = count / L
        ranked = sorted(ctr.items(), key=lambda kv: (-kv[1], kv[0]))
        for rank, (v, j) in enumerate(ranked[:max_rank], start=1):
            out[(sym, slot, v)] = (
                ref_npmi(j / L, p_sub, ref_integer_prior(rank, n)),
                rank,
                j,
            )
    return out


def prune(c_integer_scores, t_c, top_n):
    return {
        key: val
        for key, val in c_integer_scores.items()
        if val[0] >= t_c and val[1] <= top_n
    }


def best_per_integer(survivors):
    """One strongest (ngram, slot) per integer; mirrors the documented rule."""
    best = {}
    for (sym, slot, v), (score, rank, joint) in survivors.items():
        strength = (score, joint, slot is not None, -(slot or 0), sym)
        if v not in best or strength > best[v][0]:
            best[v] = (strength, (sym, slot, v))
    return [rep for _, rep in best.values()]


def referent_scores(records, representatives):
    """(leftover, slot|None, offset) NPMI from the matched traversal."""
    L = len(records)
    joints = Counter()
    ctx = Counter()
    for r in records:
        named = visible_named(r)
        m = r.message
        for sym, slot, v in representatives:
            slots = [slot]
            if slot is None:
                slots = [1, 2, 3] if len(sym) == 1 else [1, 2]
            for s in slots:
                if tuple(m[s - 1 : s - 1 + len(sym)]) != sym:
                    continue
                off = next((o for o, val in named.items() if val == v), None)
                if off is None:
                    continue
                ctx[off] += 1
                for piece in PIECES[(s, len(sym))]:
                    piece_sym = tuple(m[q - 1] for q in piece)
                    joints[((piece_sym, piece[0]), off)] += 1
                    joints[((piece_sym, None), off)] += 1
    sub_totals = Counter()
    for (sub, off), j in joints.items():
        sub_totals[sub] += j
    out = {}
    for (sub, off), j in joints.items():
        out[(sub[0], sub[1], off)] = ref_npmi(
            j / L, sub_totals[sub] / L, ctx[off] / L
        )
    return out
