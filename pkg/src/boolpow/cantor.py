"""Exact clopen algebra of the Cantor space X = {0,1}^w, distinguished
points, and clopens of the punctured space X° = X minus the points.

Clopens are canonical prefix antichains.  Points are eventually periodic
binary sequences.  A context fixes n distinguished points x_i = 1^(i-1) 0^w
whose punctured neighbourhoods decompose into the branch cells
cell(i, j) = 1^(i-1) 0^j 1 . X (j >= 1); clopens of X° are stored as an
exceptional clopen below a threshold plus one periodic inclusion word per
branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Iterable, Optional

from .errors import ContextMismatch, EmptyInput, EmptyOrFull, NotGood
from .seqs import EPSet

# ---------------------------------------------------------------------------
# canonical antichain algebra on frozensets of binary words

_FULL = frozenset({""})
_EMPTY = frozenset()


def _split0(ws):
    return frozenset(w[1:] for w in ws if w[0] == "0")


def _split1(ws):
    return frozenset(w[1:] for w in ws if w[0] == "1")


def _join(l, r):
    if l == _FULL and r == _FULL:
        return _FULL
    return frozenset({"0" + w for w in l} | {"1" + w for w in r})


def _canon(ws) -> frozenset:
    ws = frozenset(ws)
    if not ws:
        return _EMPTY
    if "" in ws:
        return _FULL
    return _join(_canon(_split0(ws)), _canon(_split1(ws)))


def _union(a, b):
    if a == _FULL or b == _FULL:
        return _FULL
    if not a:
        return b
    if not b:
        return a
    return _join(_union(_split0(a), _split0(b)), _union(_split1(a), _split1(b)))


def _inter(a, b):
    if not a or not b:
        return _EMPTY
    if a == _FULL:
        return b
    if b == _FULL:
        return a
    return _join(_inter(_split0(a), _split0(b)), _inter(_split1(a), _split1(b)))


def _compl(a):
    if a == _FULL:
        return _EMPTY
    if not a:
        return _FULL
    return _join(_compl(_split0(a)), _compl(_split1(a)))


@dataclass(frozen=True)
class Clopen:
    """Clopen subset of X as a canonical prefix antichain.

    No word is a prefix of another and no two sibling words p0, p1 are
    both present.  The empty set is (), all of X is ("",).
    """

    words: tuple[str, ...]

    @staticmethod
    def make(words: Iterable[str]) -> "Clopen":
        for w in words:
            if any(c not in "01" for c in w):
                raise ValueError(f"bad word {w!r}")
        return Clopen(tuple(sorted(_canon(words))))

    @staticmethod
    def empty() -> "Clopen":
        return Clopen(())

    @staticmethod
    def all() -> "Clopen":
        return Clopen(("",))

    def _set(self):
        return frozenset(self.words)

    def union(self, other: "Clopen") -> "Clopen":
        return Clopen(tuple(sorted(_union(self._set(), other._set()))))

    def intersect(self, other: "Clopen") -> "Clopen":
        return Clopen(tuple(sorted(_inter(self._set(), other._set()))))

    def complement(self) -> "Clopen":
        return Clopen(tuple(sorted(_compl(self._set()))))

    def difference(self, other: "Clopen") -> "Clopen":
        return self.intersect(other.complement())

    def is_empty(self) -> bool:
        return not self.words

    def is_all(self) -> bool:
        return self.words == ("",)

    def is_subset(self, other: "Clopen") -> bool:
        return self.difference(other).is_empty()

    def contains_word(self, w: str) -> bool:
        """Whole-cell containment: cell(w) subset of self."""
        return Clopen.make([w]).is_subset(self)

    def meets_word(self, w: str) -> bool:
        return not self.intersect(Clopen.make([w])).is_empty()


def prefix_overlap(words) -> bool:
    """Whether two of the cells intersect (one word prefixes another)."""
    ws = sorted(words)
    for a, b in zip(ws, ws[1:]):
        if b.startswith(a):
            return True
    return False


def split(b: Clopen) -> tuple[Clopen, Clopen]:
    """Split a nonempty clopen into two disjoint nonempty clopens."""
    if b.is_empty():
        raise EmptyInput("cannot split the empty clopen")
    w = min(b.words, key=lambda x: (len(x), x))
    first = Clopen.make([w + "0"])
    return first, b.difference(first)


# ---------------------------------------------------------------------------
# eventually periodic points


@dataclass(frozen=True)
class Point:
    """The sequence pre . per^w, with minimal preperiod and primitive period."""

    pre: str
    per: str

    @staticmethod
    def make(pre: str, per: str) -> "Point":
        if not per or any(c not in "01" for c in pre + per):
            raise ValueError((pre, per))
        n = len(per)
        for d in range(1, n):
            if n % d == 0 and per == (per[:d] * (n // d)):
                per = per[:d]
                break
        while pre and pre[-1] == per[-1]:
            per = per[-1] + per[:-1]
            pre = pre[:-1]
        return Point(pre, per)

    def bit(self, i: int) -> str:
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def startswith(self, w: str) -> bool:
        return all(self.bit(i) == c for i, c in enumerate(w))

    def drop(self, k: int) -> "Point":
        if k <= len(self.pre):
            return Point.make(self.pre[k:], self.per)
        sh = (k - len(self.pre)) % len(self.per)
        return Point.make("", self.per[sh:] + self.per[:sh])

    def prepend(self, w: str) -> "Point":
        return Point.make(w + self.pre, self.per)

    def prefix(self, k: int) -> str:
        return "".join(self.bit(i) for i in range(k))


def point_in(x: Point, b: Clopen) -> bool:
    return any(x.startswith(w) for w in b.words)


def cell_witness(w: str) -> Point:
    """A canonical point inside cell(w) distinct from every x_i."""
    return Point.make(w, "01")


# ---------------------------------------------------------------------------
# distinguished points and branch cells


@dataclass(frozen=True)
class PointContext:
    """n distinguished points x_i = 1^(i-1) 0^w with their branch cells."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(self.n)

    def point(self, i: int) -> Point:
        if not 1 <= i <= self.n:
            raise IndexError(i)
        return Point.make("1" * (i - 1), "0")

    def points(self) -> list[Point]:
        return [self.point(i) for i in range(1, self.n + 1)]

    def cellword(self, i: int, j: int) -> str:
        if not (1 <= i <= self.n and j >= 1):
            raise IndexError((i, j))
        return "1" * (i - 1) + "0" * j + "1"

    def cell(self, i: int, j: int) -> Clopen:
        return Clopen.make([self.cellword(i, j)])

    def nbhd_word(self, i: int, d: int) -> str:
        """1^(i-1) 0^d, the clopen of X containing x_i and cells j >= d."""
        return "1" * (i - 1) + "0" * d

    def offbranch(self) -> Clopen:
        """Region carrying no branch cells: 1^n . X (all of X when n = 0)."""
        return Clopen.make(["1" * self.n])

    def region(self, d: int) -> Clopen:
        """Off-branch region plus the cells of tail index <= d."""
        out = Clopen.all()
        for i in range(1, self.n + 1):
            out = out.difference(Clopen.make([self.nbhd_word(i, d + 1)]))
        return out

    def points_clopen_complement(self) -> Clopen:
        return Clopen.all()

    def locate(self, x: Point):
        """("point", i) / ("cell", i, j, suffix) / ("off", None)."""
        ones = 0
        while ones < self.n and x.bit(ones) == "1":
            ones += 1
        if ones >= self.n:
            return ("off", None)
        i = ones + 1
        rest = x.drop(ones)
        if rest == Point.make("", "0"):
            return ("point", i)
        zeros = 0
        while rest.bit(zeros) == "0":
            zeros += 1
        return ("cell", i, zeros, rest.drop(zeros + 1))

    def point_index(self, x: Point) -> Optional[int]:
        for i in range(1, self.n + 1):
            if self.point(i) == x:
                return i
        return None


# ---------------------------------------------------------------------------
# clopens of the punctured space


@dataclass(frozen=True)
class ClopenType:
    """Branches accumulating the set (ins) and its complement (outs)."""

    ins: frozenset[int]
    outs: frozenset[int]


@dataclass(frozen=True)
class TailClopen:
    """Clopen subset of X°.

    The exceptional part is an arbitrary clopen inside region(threshold);
    beyond the threshold, branch i contains cell(i, j) as a whole iff
    tails[i-1][(j - threshold - 1) % len] == '1'.  Never contains any x_i.
    """

    ctx: PointContext
    threshold: int
    exceptional: Clopen
    tails: tuple[str, ...]

    @staticmethod
    def make(ctx, threshold, exceptional, tails) -> "TailClopen":
        tails = tuple(tails)
        if len(tails) != ctx.n:
            raise ValueError("one tail word per branch")
        for w in tails:
            if not w or any(c not in "01" for c in w):
                raise ValueError(f"bad tail word {w!r}")
        if not exceptional.is_subset(ctx.region(threshold)):
            raise ValueError("exceptional part leaks into a branch tail")
        tails = tuple(_primitive_str(w) for w in tails)
        # minimal threshold: pull whole cells at the boundary back into tails
        d, exc = threshold, exceptional
        while d > 0:
            ok = True
            for i in range(1, ctx.n + 1):
                cell = ctx.cell(i, d)
                part = exc.intersect(cell)
                whole = part == cell
                if not (whole or part.is_empty()):
                    ok = False
                    break
                if ("1" if whole else "0") != tails[i - 1][-1]:
                    ok = False
                    break
            if not ok:
                break
            for i in range(1, ctx.n + 1):
                exc = exc.difference(ctx.cell(i, d))
            tails = tuple(w[-1] + w[:-1] for w in tails)
            d -= 1
        tails = tuple(_primitive_str(w) for w in tails)
        return TailClopen(ctx, d, exc, tails)

    @staticmethod
    def empty(ctx) -> "TailClopen":
        return TailClopen.make(ctx, 0, Clopen.empty(), ("0",) * ctx.n)

    @staticmethod
    def full(ctx) -> "TailClopen":
        """All of X°."""
        return TailClopen.make(ctx, 0, ctx.region(0), ("1",) * ctx.n)

    @staticmethod
    def from_clopen(ctx, b: Clopen) -> "TailClopen":
        """b minus the distinguished points, as a clopen of X°."""
        d = max([len(w) for w in b.words], default=0)
        tails = []
        for i in range(1, ctx.n + 1):
            tails.append("1" if point_in(ctx.point(i), b) else "0")
        exc = b.intersect(ctx.region(d))
        return TailClopen.make(ctx, d, exc, tails)

    def tail_bit(self, i: int, j: int) -> str:
        w = self.tails[i - 1]
        return w[(j - self.threshold - 1) % len(w)]

    def tail_epset(self, i: int) -> EPSet:
        """Whole-cell membership on branch i beyond the threshold."""
        return EPSet.make(
            (False,) * self.threshold,
            tuple(c == "1" for c in self.tails[i - 1]),
        )

    def raised(self, d: int) -> "TailClopen":
        """Same set re-expressed at threshold d >= current (not canonical)."""
        if d < self.threshold:
            raise ValueError(d)
        exc = self.exceptional
        tails = list(self.tails)
        for j in range(self.threshold + 1, d + 1):
            for i in range(1, self.ctx.n + 1):
                if self.tail_bit(i, j) == "1":
                    exc = exc.union(self.ctx.cell(i, j))
        sh = d - self.threshold
        for i in range(self.ctx.n):
            w = tails[i]
            k = sh % len(w)
            tails[i] = w[k:] + w[:k]
        return TailClopen(self.ctx, d, exc, tuple(tails))

    def _binop(self, other, excfn, bitfn) -> "TailClopen":
        if self.ctx != other.ctx:
            raise ContextMismatch((self.ctx, other.ctx))
        d = max(self.threshold, other.threshold)
        a, b = self.raised(d), other.raised(d)
        exc = excfn(a.exceptional, b.exceptional)
        tails = []
        for i in range(self.ctx.n):
            L = lcm(len(a.tails[i]), len(b.tails[i]))
            w1 = (a.tails[i] * (L // len(a.tails[i])))
            w2 = (b.tails[i] * (L // len(b.tails[i])))
            tails.append("".join(bitfn(x, y) for x, y in zip(w1, w2)))
        return TailClopen.make(self.ctx, d, exc, tails)

    def union(self, other) -> "TailClopen":
        return self._binop(
            other, lambda p, q: p.union(q), lambda x, y: "1" if "1" in (x, y) else "0"
        )

    def intersect(self, other) -> "TailClopen":
        return self._binop(
            other,
            lambda p, q: p.intersect(q),
            lambda x, y: "1" if x == y == "1" else "0",
        )

    def difference(self, other) -> "TailClopen":
        return self.intersect(other.complement())

    def complement(self) -> "TailClopen":
        """Complement within X°."""
        exc = self.ctx.region(self.threshold).difference(self.exceptional)
        tails = ["".join("1" if c == "0" else "0" for c in w) for w in self.tails]
        return TailClopen.make(self.ctx, self.threshold, exc, tails)

    def is_empty(self) -> bool:
        return self.exceptional.is_empty() and all(
            set(w) == {"0"} for w in self.tails
        )

    def is_full(self) -> bool:
        return self.complement().is_empty()

    def is_subset(self, other) -> bool:
        return self.difference(other).is_empty()

    def extends_to_clopen(self) -> bool:
        """True when every tail word is constant."""
        return all(len(set(w)) == 1 for w in self.tails)

    def to_clopen(self) -> Clopen:
        """Closure in X: adds x_i for every all-ones branch."""
        if not self.extends_to_clopen():
            raise ValueError("branch tails are not eventually constant")
        out = self.exceptional
        for i in range(1, self.ctx.n + 1):
            if self.tails[i - 1] == "1":
                out = out.union(Clopen.make([self.ctx.nbhd_word(i, self.threshold + 1)]))
        return out

    def contains_point(self, x: Point) -> bool:
        loc = self.ctx.locate(x)
        if loc[0] == "point":
            return False
        if loc[0] == "cell":
            _, i, j, _ = loc
            if j > self.threshold:
                return self.tail_bit(i, j) == "1"
        return point_in(x, self.exceptional)


def _primitive_str(w: str) -> str:
    n = len(w)
    for d in range(1, n):
        if n % d == 0 and w == w[:d] * (n // d):
            return w[:d]
    return w


def type_of(c: TailClopen) -> ClopenType:
    """Branches whose point is a limit point of c (ins) and of X° minus c
    (outs); requires c proper and nonempty."""
    if c.is_empty() or c.is_full():
        raise EmptyOrFull("type is defined for proper nonempty clopens of X°")
    ins = frozenset(
        i for i in range(1, c.ctx.n + 1) if "1" in c.tails[i - 1]
    )
    outs = frozenset(
        i for i in range(1, c.ctx.n + 1) if "0" in c.tails[i - 1]
    )
    return ClopenType(ins, outs)


def is_good(c: TailClopen) -> bool:
    """Good: both c and its complement accumulate at every point."""
    if c.is_empty() or c.is_full():
        return False
    t = type_of(c)
    allb = frozenset(range(1, c.ctx.n + 1))
    return t.ins == allb and t.outs == allb


def split_cyclic(c: TailClopen, parts: int, exceptional_to: int = 0):
    """Partition c into `parts` disjoint pieces: the whole tail cells of c
    are dealt out cyclically by rank on every branch, and the exceptional
    content of c goes to piece `exceptional_to`."""
    if parts < 1:
        raise ValueError(parts)
    ctx = c.ctx
    d = c.threshold
    out = []
    for r in range(parts):
        tails = []
        for i in range(ctx.n):
            w = c.tails[i]
            L = len(w) * parts
            ww = w * parts
            bits = []
            rank = 0
            for o in range(L):
                if ww[o] == "1":
                    bits.append("1" if rank % parts == r else "0")
                    rank += 1
                else:
                    bits.append("0")
            tails.append("".join(bits) if "1" in "".join(bits) else "0")
        exc = c.exceptional if r == exceptional_to else Clopen.empty()
        out.append(TailClopen.make(ctx, d, exc, tails))
    return out


def split_good(c: TailClopen) -> tuple[TailClopen, TailClopen]:
    """Split a good clopen into two disjoint good clopens covering it."""
    if not is_good(c):
        raise NotGood(c)
    a, b = split_cyclic(c, 2)
    return a, b


# ---------------------------------------------------------------------------
# tabular bijections of X (finite prefix exchanges)


@dataclass(frozen=True)
class Table:
    """Bijection of X given by pairs (p, q): p.s -> q.s; the p's and the
    q's each form a complete prefix partition of X."""

    pairs: tuple[tuple[str, str], ...]

    @staticmethod
    def make(pairs) -> "Table":
        pairs = [(str(p), str(q)) for p, q in pairs]
        srcs = [p for p, _ in pairs]
        if prefix_overlap(srcs):
            raise ValueError("overlapping source cells")
        if not Clopen.make(srcs).is_all():
            raise ValueError("source cells do not cover X")
        dsts = [q for _, q in pairs]
        if prefix_overlap(dsts):
            raise ValueError("overlapping image cells")
        if not Clopen.make(dsts).is_all():
            raise ValueError("image cells do not cover X")
        return Table(_reduce_pairs(pairs))

    @staticmethod
    def identity() -> "Table":
        return Table((("", ""),))

    def is_identity(self) -> bool:
        return self.pairs == (("", ""),)

    def inverse(self) -> "Table":
        return Table(_reduce_pairs([(q, p) for p, q in self.pairs]))

    def compose(self, first: "Table") -> "Table":
        """self after first."""
        out = []
        for p, q in first.pairs:
            for p2, q2 in self.pairs:
                if p2.startswith(q):
                    out.append((p + p2[len(q):], q2))
                elif q.startswith(p2):
                    out.append((p, q2 + q[len(p2):]))
        return Table(_reduce_pairs(out))

    def apply_point(self, x: Point) -> Point:
        for p, q in self.pairs:
            if x.startswith(p):
                return x.drop(len(p)).prepend(q)
        raise AssertionError("incomplete table")

    def apply_clopen(self, b: Clopen) -> Clopen:
        out = []
        for w in b.words:
            for p, q in self.pairs:
                if w.startswith(p):
                    out.append(q + w[len(p):])
                elif p.startswith(w) and p != w:
                    out.append(q)
        return Clopen.make(out)

    def restrict(self, b: Clopen) -> list[tuple[str, str]]:
        """Absolute (src, dst) prefix pairs covering exactly b."""
        out = []
        for w in b.words:
            for p, q in self.pairs:
                if w.startswith(p):
                    out.append((w, q + w[len(p):]))
                elif p.startswith(w) and p != w:
                    out.append((p, q))
        return out


def _reduce_pairs(pairs):
    cur = sorted(set(pairs))
    while True:
        bysrc = dict(cur)
        merged = False
        for p, q in list(bysrc.items()):
            if p.endswith("0") and q.endswith("0"):
                p2, q2 = p[:-1] + "1", q[:-1] + "1"
                if bysrc.get(p2) == q2:
                    del bysrc[p]
                    del bysrc[p2]
                    bysrc[p[:-1]] = q[:-1]
                    merged = True
                    break
        cur = sorted(bysrc.items())
        if not merged:
            return tuple(cur)


def relative_pairs(abs_pairs, src_root: str, dst_root: str) -> list[tuple[str, str]]:
    """Strip common roots off absolute pairs lying inside two cells."""
    out = []
    for p, q in abs_pairs:
        if not (p.startswith(src_root) and q.startswith(dst_root)):
            raise ValueError((p, q, src_root, dst_root))
        out.append((p[len(src_root):], q[len(dst_root):]))
    return out
