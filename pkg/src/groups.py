"""Finite groups carried by Cayley multigraphs.

Elements are vertices. The identity is the basepoint and generator j is the
endpoint of the label-j edge leaving it. Edges run x -> x * s, so walking a
word from u multiplies u on the right and graph distance is left-invariant:
d(x, y) = |x^-1 y|.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import get_settings
from .errors import (
    BadGenerator,
    BadInput,
    NotBijective,
    NotCayley,
    NotHomomorphic,
    OrderCapExceeded,
    SizeCapExceeded,
)
from .multigraph import LabeledMultigraph, bfs_metric

# Multiplication tables are dense order x order arrays
TABLE_LIMIT = 4096

Letter = tuple[int, int]


@dataclass(frozen=True)
class Word:
    """Free-group word as (generator index, +1 | -1) letters."""

    letters: tuple[Letter, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Lowercase letters are generators a, b, c, ...; uppercase are their inverses.

        "" and "e" both denote the empty word.
        """
        text = text.strip()
        if text in ("", "e", "1"):
            return cls()
        letters = []
        for ch in text:
            if not ch.isalpha() or not ch.isascii():
                raise BadInput(f"Bad letter {ch!r} in word {text!r}")
            letters.append((ord(ch.lower()) - ord("a"), 1 if ch.islower() else -1))
        return cls(tuple(letters))

    @classmethod
    def generator(cls, index: int) -> "Word":
        return cls(((index, 1),))

    def reduced(self) -> "Word":
        stack: list[Letter] = []
        for gen, sign in self.letters:
            if stack and stack[-1] == (gen, -sign):
                stack.pop()
            else:
                stack.append((gen, sign))
        return Word(tuple(stack))

    def inverse(self) -> "Word":
        return Word(tuple((gen, -sign) for gen, sign in reversed(self.letters)))

    def substitute(self, images: list["Word"]) -> "Word":
        """Apply the free-group endomorphism generator j -> images[j]."""
        letters: list[Letter] = []
        for gen, sign in self.letters:
            if gen >= len(images):
                raise BadGenerator(f"No image for generator {gen}")
            image = images[gen] if sign > 0 else images[gen].inverse()
            letters.extend(image.letters)
        return Word(tuple(letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return "".join(chr(ord("a") + g) if s > 0 else chr(ord("A") + g) for g, s in self.letters)


class QuotientGroup:
    """A finite group read off a label-regular, connected Cayley multigraph.

    Construction certifies the graph: left multiplication by every element
    must commute with every generator step, which makes the vertex set a group
    under u * v = (walk v's normal form from u).

    Raises:
        NotCayley: if the graph is not label-regular, not connected, or fails certification
        SizeCapExceeded: if the order exceeds the multiplication-table limit
    """

    def __init__(self, graph: LabeledMultigraph, generator_count: int | None = None):
        log = logging.getLogger("quotient_group")
        self.graph = graph
        self.order = graph.vertex_count
        self.generator_count = graph.label_count if generator_count is None else generator_count
        self.identity = graph.basepoint
        if self.order == 0:
            raise NotCayley("Empty graph is not a group")
        if self.order > TABLE_LIMIT:
            raise SizeCapExceeded(
                f"Group of order {self.order} exceeds table limit {TABLE_LIMIT}",
                witness={"order": self.order, "limit": TABLE_LIMIT},
            )

        self.out_steps, self.in_steps = self._label_permutations()
        self._normal_forms, self._parents = self._spanning_words()
        self.table = self._certified_table()
        log.debug(f"Certified group of order {self.order} on {self.generator_count} generators")

    def _label_permutations(self) -> tuple[np.ndarray, np.ndarray]:
        k, n = self.generator_count, self.order
        out_steps = np.full((k, n), -1, dtype=np.int64)
        in_steps = np.full((k, n), -1, dtype=np.int64)
        for index, (src, dst, label) in enumerate(self.graph.edges):
            if label >= k:
                raise NotCayley(f"Edge {index} has label {label} >= generator count {k}")
            if out_steps[label, src] != -1 or in_steps[label, dst] != -1:
                raise NotCayley(
                    f"Label {label} repeats at vertex {src} or {dst}",
                    witness={"edge": index, "label": label},
                )
            out_steps[label, src] = dst
            in_steps[label, dst] = src
        missing = np.argwhere(out_steps == -1)
        if missing.size:
            label, vertex = missing[0].tolist()
            raise NotCayley(
                f"Vertex {vertex} has no outgoing label-{label} edge",
                witness={"vertex": vertex, "label": label},
            )
        return out_steps, in_steps

    def _spanning_words(self) -> tuple[list[Word | None], list[tuple[int, Letter] | None]]:
        """BFS over generator steps (labels ascending, forward before backward)."""
        n = self.order
        words: list[Word | None] = [None] * n
        parents: list[tuple[int, Letter] | None] = [None] * n
        words[self.identity] = Word()
        frontier = [self.identity]
        while frontier:
            next_frontier = []
            for u in frontier:
                for gen in range(self.generator_count):
                    for sign, steps in ((1, self.out_steps), (-1, self.in_steps)):
                        w = int(steps[gen, u])
                        if words[w] is None:
                            words[w] = Word(words[u].letters + ((gen, sign),))
                            parents[w] = (u, (gen, sign))
                            next_frontier.append(w)
            frontier = next_frontier
        unreached = [v for v in range(n) if words[v] is None]
        if unreached:
            raise NotCayley(
                f"{len(unreached)} vertices unreachable from the identity",
                witness={"unreached": unreached[:10]},
            )
        return words, parents

    def _certified_table(self) -> np.ndarray:
        """table[u, v] = u * v, built column by column along the spanning words."""
        n = self.order
        table = np.empty((n, n), dtype=np.int64)
        table[:, self.identity] = np.arange(n)
        order = sorted(range(n), key=lambda v: len(self._normal_forms[v]))
        for v in order:
            if v == self.identity:
                continue
            parent, (gen, sign) = self._parents[v]
            steps = self.out_steps if sign > 0 else self.in_steps
            table[:, v] = steps[gen, table[:, parent]]

        for gen in range(self.generator_count):
            # left multiplication must commute with the right generator step
            bad = np.argwhere(table[:, self.out_steps[gen]] != self.out_steps[gen][table])
            if bad.size:
                u, v = bad[0].tolist()
                raise NotCayley(
                    f"Walking from {u} is not well defined at {v} for generator {gen}",
                    witness={"u": u, "v": v, "generator": gen},
                )
        return table

    # === Element operations ===

    def normal_form(self, v: int) -> Word:
        return self._normal_forms[v]

    def generator_element(self, gen: int) -> int:
        if not 0 <= gen < self.generator_count:
            raise BadGenerator(f"Generator {gen} out of range (arity {self.generator_count})")
        return int(self.out_steps[gen, self.identity])

    def evaluate_word(self, w: Word, start: int | None = None) -> int:
        """Endpoint of the path spelled by w from start (default identity)."""
        v = self.identity if start is None else start
        for gen, sign in w.letters:
            if not 0 <= gen < self.generator_count:
                raise BadGenerator(
                    f"Generator {gen} out of range (arity {self.generator_count})",
                    witness={"generator": gen, "word": str(w)},
                )
            v = int((self.out_steps if sign > 0 else self.in_steps)[gen, v])
        return v

    def multiply(self, u: int, v: int) -> int:
        return int(self.table[u, v])

    @cached_property
    def inverses(self) -> np.ndarray:
        return np.argmax(self.table == self.identity, axis=1)

    def inverse(self, v: int) -> int:
        return int(self.inverses[v])

    def multiplication_table(self) -> np.ndarray:
        return self.table.copy()

    @cached_property
    def metric(self) -> np.ndarray:
        return bfs_metric(self.graph)

    def word_length(self, v: int) -> int:
        return int(self.metric[self.identity, v])

    def verify_group_axioms(self, limit: int | None = None) -> bool:
        """Identity, inverses and associativity on the table.

        Associativity is checked for every triple when the order is within
        `limit` (default BOXSPACE_EXHAUSTIVE_LIMIT), otherwise for left factors
        0..limit-1 against all pairs.

        Raises:
            NotCayley: with the first failing element(s) as witness
        """
        limit = get_settings().exhaustive_limit if limit is None else limit
        n = self.order
        index = np.arange(n)
        if not (np.array_equal(self.table[self.identity], index) and np.array_equal(self.table[:, self.identity], index)):
            raise NotCayley("Basepoint is not a two-sided identity")
        for u in range(n):
            if np.count_nonzero(self.table[u] == self.identity) != 1:
                raise NotCayley(f"Element {u} has no unique right inverse", witness={"element": u})
        if not np.array_equal(self.table[self.inverses, index], np.full(n, self.identity)):
            raise NotCayley("Right inverses are not left inverses")

        for a in range(min(n, limit)):
            left = self.table[self.table[a]]
            right = self.table[a][self.table]
            bad = np.argwhere(left != right)
            if bad.size:
                b, c = bad[0].tolist()
                raise NotCayley(
                    f"Associativity fails at ({a}, {b}, {c})",
                    witness={"triple": [a, b, c]},
                )
        return True

    def cayley_graph(self, gens: list[Word]) -> LabeledMultigraph:
        """Cayley multigraph of this group for another generating list (label j = gens[j])."""
        if len(subgroup_image(self, gens)) != self.order:
            raise BadGenerator(
                f"Words {[str(w) for w in gens]} do not generate the group",
                witness={"generators": [str(w) for w in gens]},
            )
        values = [self.evaluate_word(w) for w in gens]
        edges = [(v, int(self.table[v, g]), j) for j, g in enumerate(values) for v in range(self.order)]
        return LabeledMultigraph(vertex_count=self.order, edges=tuple(edges), basepoint=self.identity)


def subgroup_image(q: QuotientGroup, gens: list[Word]) -> list[int]:
    """Member vertices of the subgroup generated by the images of gens, sorted."""
    values = [q.evaluate_word(w) for w in gens]
    steps = values + [q.inverse(v) for v in values]
    members = {q.identity}
    frontier = [q.identity]
    while frontier:
        next_frontier = []
        for u in frontier:
            for s in steps:
                w = int(q.table[u, s])
                if w not in members:
                    members.add(w)
                    next_frontier.append(w)
        frontier = next_frontier
    return sorted(members)


def is_homomorphism(f: np.ndarray, source: QuotientGroup, target: QuotientGroup) -> bool:
    """f(u * s) == f(u) * f(s) for all u and every generator s of source, and f(e) = e."""
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (source.order,) or f.min(initial=0) < 0 or f.max(initial=0) >= target.order:
        return False
    if f[source.identity] != target.identity:
        return False
    for gen in range(source.generator_count):
        s = source.generator_element(gen)
        if not np.array_equal(f[source.table[:, s]], target.table[f, f[s]]):
            return False
    return True


def induced_automorphism(q: QuotientGroup, images: list[Word]) -> np.ndarray:
    """Permutation of q induced by the free-group map generator j -> images[j].

    Raises:
        BadGenerator: if the number of images differs from q's generator count
        NotBijective: if the induced map is not a permutation
        NotHomomorphic: if the map does not descend to q
    """
    log = logging.getLogger("induced_automorphism")
    if len(images) != q.generator_count:
        raise BadGenerator(f"Expected {q.generator_count} images, got {len(images)}")

    image_values = [q.evaluate_word(w) for w in images]
    perm = np.full(q.order, -1, dtype=np.int64)
    perm[q.identity] = q.identity
    for v in sorted(range(q.order), key=lambda x: len(q.normal_form(x))):
        if v == q.identity:
            continue
        parent, (gen, sign) = q._parents[v]
        step = image_values[gen] if sign > 0 else q.inverse(image_values[gen])
        perm[v] = q.table[perm[parent], step]

    if len(set(perm.tolist())) != q.order:
        collisions = np.flatnonzero(np.bincount(perm, minlength=q.order) > 1)
        raise NotBijective(
            f"Induced map is not injective ({len(set(perm.tolist()))} of {q.order} images)",
            witness={"collisions": collisions[:10].tolist()},
        )
    if not is_homomorphism(perm, q, q):
        raise NotHomomorphic(
            f"Images {[str(w) for w in images]} do not induce an endomorphism of this quotient",
            witness={"images": [str(w) for w in images]},
        )
    log.debug(f"Induced automorphism from {[str(w) for w in images]}: order-{q.order} permutation")
    return perm


def compose(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """(p o q)[v] = p[q[v]]."""
    return np.asarray(p)[np.asarray(q)]


def automorphism_order(perm: np.ndarray, cap: int | None = None) -> int:
    """Smallest d >= 1 with perm^d = identity.

    Raises:
        OrderCapExceeded: if no such d <= cap (default BOXSPACE_ORDER_CAP)
    """
    cap = get_settings().order_cap if cap is None else cap
    perm = np.asarray(perm, dtype=np.int64)
    identity = np.arange(len(perm))
    power = perm.copy()
    for d in range(1, cap + 1):
        if np.array_equal(power, identity):
            return d
        power = perm[power]
    raise OrderCapExceeded(f"Permutation order exceeds {cap}", witness={"cap": cap})
