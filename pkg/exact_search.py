"""
Exact maximum l-fold-sumfree subsets of tiny boxes {1..n}^k by branch and bound.

Points are visited in lexicographic order and each node either includes the
next point (when the partial set stays l-fold-sumfree) or excludes it. Points
are packed into integers in base l*n+1, so a sum of at most l points never
carries and integer addition is vector addition.
"""
import threading
import concurrent.futures
from typing import List, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from constructions import PointSet, is_l_fold_sumfree, iter_box
from errors import InstanceTooLargeError, InvalidParameterError
from settings import DEFAULT_NODE_BUDGET, EXHAUSTIVE_CELL_CAP


class SearchInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(gt=0)
    k: int = Field(gt=0)
    l: int = Field(2, ge=2)
    node_budget: int = Field(DEFAULT_NODE_BUDGET, gt=0)
    cell_cap: int = Field(EXHAUSTIVE_CELL_CAP, gt=0)

    @property
    def cells(self) -> int:
        return self.n**self.k

    def check_caps(self) -> None:
        if self.cells > self.cell_cap:
            raise InstanceTooLargeError(
                f"n^k = {self.n}^{self.k} = {self.cells} exceeds the exhaustive cap {self.cell_cap}"
            )


class SearchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_size: int = Field(ge=0)
    witness: PointSet
    nodes_explored: int = Field(ge=0)
    exhaustive: bool

    @property
    def density(self) -> float:
        return self.max_size / self.witness.ambient_n**self.witness.ambient_k


class _BudgetExhausted(Exception):
    pass


class _SharedState:
    """Incumbent size and node counter shared by the branch workers."""

    def __init__(self, node_budget: int):
        self.lock = threading.Lock()
        self.best_size = 0
        self.nodes = 0
        self.node_budget = node_budget

    def tick(self) -> None:
        with self.lock:
            self.nodes += 1
            if self.nodes > self.node_budget:
                raise _BudgetExhausted()

    def offer(self, size: int) -> None:
        with self.lock:
            if size > self.best_size:
                self.best_size = size


def _has_l_sum(target: int, pool: List[int], pool_set: Set[int], count: int, start: int = 0) -> bool:
    """True when target is a sum of `count` pool elements (repetition allowed)."""
    if count == 1:
        return target in pool_set
    for idx in range(start, len(pool)):
        x = pool[idx]
        # remaining summands are >= x
        if x * count > target:
            break
        if _has_l_sum(target - x, pool, pool_set, count - 1, idx):
            return True
    return False


def _can_add(p: int, chosen: List[int], chosen_set: Set[int], l: int) -> bool:
    """
    Only tuples involving p need checking: p as the sum of l chosen points, or
    p among the summands of a sum that lands on a chosen point.
    """
    if chosen and _has_l_sum(p, chosen, chosen_set, l):
        return False
    pool = sorted(chosen + [p])
    pool_set = set(pool)
    for z in chosen:
        if z > p and _has_l_sum(z - p, pool, pool_set, l - 1):
            return False
    return True


class _BranchSearch:
    def __init__(self, codes: List[int], l: int, shared: _SharedState):
        self.codes = codes
        self.l = l
        self.shared = shared
        self.best: List[int] = []
        self.best_size = -1

    def run(self, start: int, chosen: List[int]) -> None:
        try:
            self._visit(start, chosen, set(chosen))
        except _BudgetExhausted:
            pass

    def _visit(self, idx: int, chosen: List[int], chosen_set: Set[int]) -> None:
        self.shared.tick()
        size = len(chosen)
        if size > self.best_size:
            self.best, self.best_size = list(chosen), size
            self.shared.offer(size)
        if idx == len(self.codes):
            return
        bound = size + len(self.codes) - idx
        if bound <= self.best_size or bound < self.shared.best_size:
            return
        p = self.codes[idx]
        if _can_add(p, chosen, chosen_set, self.l):
            chosen.append(p)
            chosen_set.add(p)
            self._visit(idx + 1, chosen, chosen_set)
            chosen.pop()
            chosen_set.discard(p)
        self._visit(idx + 1, chosen, chosen_set)


def max_sumfree_exact(inst: SearchInstance, workers: int = 1) -> SearchResult:
    """
    Exact optimum with the lexicographically smallest optimal witness. With
    workers >= 2 the include/exclude branches of the first point run on a
    thread pool; ties are broken at collection time in favour of the include
    branch, so the witness does not depend on completion order.
    """
    inst.check_caps()
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")

    n, k, l = inst.n, inst.k, inst.l
    base = l * n + 1
    points = list(iter_box(n, k))

    def encode(p: Tuple[int, ...]) -> int:
        code = 0
        for c in p:
            code = code * base + c
        return code

    codes = [encode(p) for p in points]
    decode = dict(zip(codes, points))
    shared = _SharedState(inst.node_budget)

    if workers == 1:
        searches = [_BranchSearch(codes, l, shared)]
        searches[0].run(0, [])
    else:
        include = _BranchSearch(codes, l, shared)
        exclude = _BranchSearch(codes, l, shared)
        with concurrent.futures.ThreadPoolExecutor(max_workers=2) as ex:
            futures = [ex.submit(include.run, 1, [codes[0]]), ex.submit(exclude.run, 1, [])]
            for f in futures:
                f.result()
        searches = [include, exclude]

    winner = max(searches, key=lambda s: s.best_size)  # first wins ties
    witness = PointSet(
        ambient_n=n,
        ambient_k=k,
        points=frozenset(decode[c] for c in winner.best),
    )
    return SearchResult(
        max_size=len(winner.best),
        witness=witness,
        nodes_explored=min(shared.nodes, inst.node_budget),
        exhaustive=shared.nodes <= inst.node_budget,
    )


def verify_witness(s: PointSet, l: int = 2) -> bool:
    return bool(is_l_fold_sumfree(s, l))
