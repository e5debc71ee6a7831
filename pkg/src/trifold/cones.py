"""Cone-type signatures from decorated directed links.

The signature of a face records every face around its three vertices, keyed
by the triple of chart values there (with each chart re-anchored so the face
itself maps to the identity, and absent incidences marked), together with
its distance offset.  Chart re-anchoring is an exact translation, so two
faces receive equal signatures exactly when their decorated directed link
unions are isomorphic as labeled graphs, identifications between the three
links included; no isomorphism search is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .development import Development, InsufficientRadiusError

Signature = tuple[tuple[int, int, int, int], ...]

_ABSENT = -1


def cone_signature(dev: Development, f: int) -> Signature:
    if not dev.is_interior(f):
        raise InsufficientRadiusError(f"face {f} is not interior; grow further")
    base_d = dev.dist[f]
    keys: dict[int, list[int]] = {}
    for t in range(3):
        v = dev.f_vert[f][t]
        group = dev.spec.vertex_groups[t]
        chart = dev.vert_chart[v]
        shift = group.inv(chart[f])
        for g, val in chart.items():
            key = keys.get(g)
            if key is None:
                key = [_ABSENT, _ABSENT, _ABSENT, 0]
                keys[g] = key
            key[t] = group.mult[shift][val]
            key[3] = dev.dist[g] - base_d
    return tuple(sorted(tuple(key) for key in keys.values()))


@dataclass
class ConeTypeEntry:
    representative: int
    multiplicity: int
    increases: tuple[bool, ...]
    successors: tuple[Signature | None, ...]


@dataclass
class ConeTypeTable:
    radius: int
    entries: dict[Signature, ConeTypeEntry]
    # faces whose successor rows disagree with their signature's representative;
    # empty whenever all half-girths are at least 3, where the directed-link
    # data provably determines continuations
    incoherent: list[tuple[Signature, int, int]]

    @property
    def count(self) -> int:
        return len(self.entries)

    @property
    def coherent(self) -> bool:
        return not self.incoherent

    def transition_system(self):
        """Signature set plus per-symbol successor rows, for certificates."""
        return {
            sig: (entry.increases, entry.successors)
            for sig, entry in self.entries.items()
        }


def enumerate_cone_types(
    dev: Development, radius: int, cache: dict[int, Signature] | None = None
) -> ConeTypeTable:
    """Table of signatures over all faces within the given distance.

    Needs the development trusted out to radius + margin so that every table
    face and every distance-increasing successor is interior.
    """
    if cache is None:
        cache = {}

    def sig_of(f: int) -> Signature:
        s = cache.get(f)
        if s is None:
            s = cone_signature(dev, f)
            cache[f] = s
        return s

    entries: dict[Signature, ConeTypeEntry] = {}
    incoherent: list[tuple[Signature, int, int]] = []
    for f in dev.ball_faces():
        if dev.dist[f] > radius:
            continue
        sig = sig_of(f)
        increases = []
        successors = []
        for s in range(dev.symbol_count):
            g = dev.neighbor(f, s)
            if g is None or not dev.final[g]:
                raise InsufficientRadiusError(
                    f"face {f} lacks a trusted neighbor on symbol {s}"
                )
            if dev.dist[g] == dev.dist[f] + 1:
                increases.append(True)
                successors.append(sig_of(g))
            else:
                increases.append(False)
                successors.append(None)
        row = ConeTypeEntry(f, 1, tuple(increases), tuple(successors))
        known = entries.get(sig)
        if known is None:
            entries[sig] = row
        else:
            if known.increases != row.increases or known.successors != row.successors:
                incoherent.append((sig, known.representative, f))
            known.multiplicity += 1
    return ConeTypeTable(radius, entries, incoherent)


def signature_counts(
    dev: Development, radius: int, cache: dict[int, Signature] | None = None
) -> list[int]:
    """Distinct signature counts over balls of radius 0..radius.

    Cheaper than full tables: successor rows are not computed, so only the
    counted faces themselves need to be interior.
    """
    if cache is None:
        cache = {}
    seen: set[Signature] = set()
    by_dist: dict[int, list[int]] = {}
    for f in dev.ball_faces():
        if dev.dist[f] <= radius:
            by_dist.setdefault(dev.dist[f], []).append(f)
    counts = []
    for r in range(radius + 1):
        for f in by_dist.get(r, []):
            sig = cache.get(f)
            if sig is None:
                sig = cone_signature(dev, f)
                cache[f] = sig
            seen.add(sig)
        counts.append(len(seen))
    return counts


def stabilization_radius(dev: Development, radius: int) -> int | None:
    """Smallest r whose transition system persists through the given radius.

    Returns None when even the last two tables differ.
    """
    cache: dict[int, Signature] = {}
    systems = [
        enumerate_cone_types(dev, r, cache).transition_system()
        for r in range(radius + 1)
    ]
    last = systems[radius]
    r0 = None
    for r in range(radius, -1, -1):
        if systems[r] == last:
            r0 = r
        else:
            break
    if r0 is None or r0 == radius:
        return None if r0 is None else r0
    return r0


@dataclass
class DeterminationReport:
    ok: bool
    depth: int
    classes_checked: int
    words_checked: int
    counterexample: tuple[int, int, tuple[int, ...]] | None = None

    def __bool__(self):
        return self.ok


def verify_cone_determination(dev: Development, radius: int, depth: int = 3) -> DeterminationReport:
    """Equal signatures must admit exactly the same geodesic extensions.

    For every class of signature-equal faces and every word of bounded
    length, the word extends one face geodesically exactly when it extends
    them all; a mismatch is returned as a counterexample.
    """
    classes: dict[Signature, list[int]] = {}
    for f in dev.ball_faces():
        if dev.dist[f] <= radius:
            classes.setdefault(cone_signature(dev, f), []).append(f)
    words_checked = 0
    classes_checked = 0
    for sig in sorted(classes):
        members = sorted(classes[sig])
        if len(members) < 2:
            continue
        classes_checked += 1
        budget = min(depth, min(dev.radius - dev.dist[f] for f in members))
        # joint depth-first walk over the word tree; members either all stay
        # geodesic or all fail, otherwise the first split is a counterexample
        stack = [((), members)]
        while stack:
            word, positions = stack.pop()
            if len(word) >= budget:
                continue
            for s in range(dev.symbol_count):
                new_pos = []
                verdicts = []
                for p in positions:
                    q = dev.neighbor(p, s)
                    geodesic = (
                        q is not None and dev.final[q] and dev.dist[q] == dev.dist[p] + 1
                    )
                    new_pos.append(q if q is not None else p)
                    verdicts.append(geodesic)
                words_checked += 1
                if any(verdicts) and not all(verdicts):
                    return DeterminationReport(
                        False, depth, classes_checked, words_checked,
                        (members[verdicts.index(True)],
                         members[verdicts.index(False)],
                         word + (s,)),
                    )
                if all(verdicts):
                    stack.append((word + (s,), new_pos))
    return DeterminationReport(True, depth, classes_checked, words_checked)


def cone_membership(dev: Development, f: int, word: list[int]) -> bool:
    """Whether the word labels a shortest route from the base through f.

    True exactly when the endpoint distance splits as the distance of f plus
    the word length; that forces the word to trace a geodesic from f, and in
    particular backtracking steps always fail.
    """
    target = f
    for s in word:
        nxt = dev.neighbor(target, s)
        if nxt is None or not dev.final[nxt]:
            raise InsufficientRadiusError("word leaves the trusted ball")
        target = nxt
    return dev.dist[target] == dev.dist[f] + len(word)


def signature_graph_dot(table: ConeTypeTable, symbols) -> str:
    """Transition graph over signatures in a dot-like text form."""
    index = {sig: i for i, sig in enumerate(sorted(table.entries))}
    lines = ["digraph cone_types {"]
    for sig, i in index.items():
        entry = table.entries[sig]
        lines.append(f'  s{i} [label="x{entry.multiplicity} rep={entry.representative}"];')
    for sig, i in index.items():
        entry = table.entries[sig]
        for s, succ in enumerate(entry.successors):
            if succ is not None and succ in index:
                lines.append(f'  s{i} -> s{index[succ]} [label="{symbols[s].name()}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
