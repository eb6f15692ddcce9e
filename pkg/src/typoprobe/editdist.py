"""Unweighted Levenshtein distance and a canonical minimal edit script.

Several minimal scripts usually exist for a pair of strings; downstream
morphology heuristics classify pairs by *where* the edits fall, so the
backtrace must be deterministic. Ties in the DP are resolved by preferring
substitution, then deletion, then insertion.
"""

from __future__ import annotations

from typing import NamedTuple

SUB = "sub"
DEL = "del"
INS = "ins"


class EditOp(NamedTuple):
    """One edit operation with its character positions in both strings.

    For substitutions both positions index the affected characters. A
    deletion has no character in the second string and an insertion none in
    the first; there the position is the gap index (0..len) where the edit
    takes place.
    """

    op: str
    pos1: int
    pos2: int


def levenshtein(s1: str, s2: str) -> int:
    """Edit distance with unit costs, O(min(n,m)) memory."""
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    if not s2:
        return len(s1)
    prev = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, start=1):
        cur = [i] + [0] * len(s2)
        for j, c2 in enumerate(s2, start=1):
            cur[j] = min(
                prev[j - 1] + (c1 != c2),
                prev[j] + 1,
                cur[j - 1] + 1,
            )
        prev = cur
    return prev[len(s2)]


def edit_script(s1: str, s2: str) -> list[EditOp]:
    """Return the canonical minimal edit script turning s1 into s2.

    Only actual edits are reported; matching characters are skipped. The
    script is minimal (its length equals ``levenshtein(s1, s2)``) and
    canonical under the substitution > deletion > insertion tie-break.
    """
    n, m = len(s1), len(s2)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            dist[i][j] = min(
                dist[i - 1][j - 1] + (s1[i - 1] != s2[j - 1]),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )

    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (s1[i - 1] != s2[j - 1]):
            if s1[i - 1] != s2[j - 1]:
                ops.append(EditOp(SUB, i - 1, j - 1))
            i -= 1
            j -= 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append(EditOp(DEL, i - 1, j))
            i -= 1
        else:
            ops.append(EditOp(INS, i, j - 1))
            j -= 1
    ops.reverse()
    return ops
