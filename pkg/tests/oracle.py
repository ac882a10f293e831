"""Straight-from-the-formula reference scorer used as a test oracle.

Deliberately naive: every split of the attributes is visited, equivalence
classes are counted by pairwise row comparison, and no code from the
package is imported.
"""
from __future__ import annotations

from itertools import product


def pk(probs, members):
    out = 1.0
    for j in members:
        out *= probs[j]
    return out


def all_splits(m):
    for bits in product((0, 1), repeat=m):
        yield [j for j in range(m) if bits[j]]


def class_size(rows, r, members):
    target = [rows[r][j] for j in members]
    return sum(1 for row in rows if [row[j] for j in members] == target)


def record_risk(rows, probs, sensitivities, alpha, r, epsilon=0.0):
    """sensitivities[r][j] = W(A_j) * W(r(A_j)) for record r."""
    m = len(probs)
    total = 0.0
    for members in all_splits(m):
        p = pk(probs, members)
        if epsilon > 0 and not p > epsilon:
            continue
        if epsilon == 0 and p == 0:
            # ε=0 keeps every set with pk > 0; pk=0 terms are zero anyway
            continue
        likelihood = p / class_size(rows, r, members)
        consequence = sum(sensitivities[r][j] for j in range(m) if j not in members)
        total += likelihood * alpha * consequence
    return total


def dataset_risks(rows, probs, sensitivities, alpha, epsilon=0.0):
    """record_risk for every row, with class sizes tallied once per split."""
    from collections import Counter

    m = len(probs)
    totals = [0.0] * len(rows)
    for members in all_splits(m):
        p = pk(probs, members)
        if not p > epsilon:
            continue
        tally = Counter(tuple(row[j] for j in members) for row in rows)
        for r, row in enumerate(rows):
            likelihood = p / tally[tuple(row[j] for j in members)]
            consequence = sum(sensitivities[r][j] for j in range(m) if j not in members)
            totals[r] += likelihood * alpha * consequence
    return totals
