"""
Analytic bounds on the maximal density of (l-fold-)sumfree sets.

Lower bounds come from diagonal stripes {a <= sum < l*a}; upper bounds come
from the fixed-point equation of the pair-counting argument (discrete and
continuous), the iterated map phi_k (continuous only), and the explicit
three-fold bound.
"""
import math
import concurrent.futures
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from errors import InvalidParameterError, RootBracketError, UnsupportedBoundError
from exact_math import (
    as_rational,
    log_wedge_complement,
    scaled_simplex_volume,
    simplex_volume_at,
    simplex_volume_float,
)
from settings import (
    ALPHA_LOWER_GUARD,
    ALPHA_UPPER_GUARD,
    PSI_SCAN_STEP,
    SEQUENCE_MAX_TERMS,
    SERIES_MAX_TERMS,
    SWEEP_COARSE_POINTS,
    TABLE_MAX_K,
    SolverConfig,
)

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2

VARIANT_DISCREPANCY_NOTE = (
    "the stated fixed-point equation and the proof-form condition f(beta) = 1 - beta/2 have different roots; "
    "the stated form is the default and matches the reference table"
)
UNSUPPORTED_FOLD_MESSAGE = "no upper-bound method is known for l >= 4; only lower bounds are available"


# -------------------------------------------------
# PART 1: RESULT TYPES
# -------------------------------------------------
class BoundConstant(str, Enum):
    C_K = "c_k"
    C_TILDE_K = "c~_k"
    C_KL = "c_{k,l}"
    C_TILDE_KL = "c~_{k,l}"


class BoundSide(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


class BoundMethod(str, Enum):
    STRIPE = "stripe"
    FIXED_POINT = "fixed_point"
    ITERATED_MAP = "iterated_map"
    EXPLICIT_THREEFOLD = "explicit_threefold"
    SWEEP = "sweep"


class Setting(str, Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class EquationVariant(str, Enum):
    STATED_FORM = "statement"
    PROOF_FORM = "proof"


class BoundResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    constant: BoundConstant
    side: BoundSide
    k: int = Field(gt=0)
    l: int = Field(2, ge=2)
    value: float = Field(ge=0.0, le=1.0)
    exact_value: Optional[Fraction] = None
    method: BoundMethod
    params: Dict[str, Any] = Field(default_factory=dict)

    def label(self) -> str:
        tilde = "~" if self.constant in (BoundConstant.C_TILDE_K, BoundConstant.C_TILDE_KL) else ""
        if self.constant in (BoundConstant.C_K, BoundConstant.C_TILDE_K):
            return f"c{tilde}_{self.k}"
        return f"c{tilde}_{{{self.k},{self.l}}}"


class UpperBoundEquation(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    variant: EquationVariant = EquationVariant.STATED_FORM


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    l: int
    a_opt: float
    volume: float
    reference_a: float
    reference_volume: float
    offset: float
    grid_points: int


class TrajectoryStop(str, Enum):
    EXCEEDED_ONE = "exceeded_one"
    NO_ESCAPE = "no_escape"
    ITERATION_CAP = "iteration_cap"


class PhiTrajectory(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    values: List[float]
    reason: TrajectoryStop

    @property
    def steps(self) -> int:
        return len(self.values) - 1


class BoundsRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    lower: BoundResult
    upper: Optional[BoundResult] = None


def constant_for(setting: Setting, l: int) -> BoundConstant:
    if setting == Setting.CONTINUOUS:
        return BoundConstant.C_TILDE_K if l == 2 else BoundConstant.C_TILDE_KL
    return BoundConstant.C_K if l == 2 else BoundConstant.C_KL


def _check_k(k: int) -> None:
    if k <= 0:
        raise InvalidParameterError(f"dimension k must be positive, got {k}")


def _check_l(l: int) -> None:
    if l < 2:
        raise InvalidParameterError(f"fold parameter l must be >= 2, got {l}")


# -------------------------------------------------
# PART 2: NUMERIC HELPERS
# -------------------------------------------------
def partial_exp_sum(x: float, upto: int, start: int = 0) -> float:
    """sum_{i=start}^{upto} x^i / i!, terms accumulated in ascending order."""
    if upto < start:
        return 0.0
    terms = []
    term = 1.0
    for i in range(upto + 1):
        if i > 0:
            term *= x / i
        if i >= start:
            terms.append(term)
    return math.fsum(terms)


def bisect_root(func: Callable[[float], float], lo: float, hi: float, cfg: SolverConfig) -> float:
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise RootBracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}"
        )
    for _ in range(cfg.max_bisection_iters):
        if hi - lo <= cfg.bisection_tolerance:
            break
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_max(func: Callable[[float], float], a: float, b: float, iters: int) -> Tuple[float, float]:
    """Golden-section search for a maximum of a unimodal function on [a, b]."""
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= 0:
        return a, func(a)
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = func(c)
    yd = func(d)
    for _ in range(iters):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = func(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = func(d)
    if yc > yd:
        return c, yc
    return d, yd


# -------------------------------------------------
# PART 3: STRIPE LOWER BOUNDS
# -------------------------------------------------
def stripe_volume(k: int, a, l: int = 2) -> Fraction:
    """Exact Vol{x in [0,1]^k : a <= sum x_i < l*a}."""
    _check_k(k)
    _check_l(l)
    a = as_rational(a)
    if a < 0 or a > k:
        raise InvalidParameterError(f"stripe offset a={a} must lie in [0, {k}]")
    upper = min(l * a, Fraction(k))
    return 1 - simplex_volume_at(k, a) - simplex_volume_at(k, k - upper)


def stripe_volume_float(k: int, a: float, l: int = 2) -> float:
    _check_k(k)
    _check_l(l)
    if a < 0 or a > k:
        raise InvalidParameterError(f"stripe offset a={a} must lie in [0, {k}]")
    upper = min(l * Fraction(a), Fraction(k))
    return 1.0 - simplex_volume_float(k, a) - simplex_volume_float(k, float(k - upper))


def lower_bound(k: int, l: int = 2, setting: Setting = Setting.DISCRETE) -> BoundResult:
    _check_k(k)
    _check_l(l)
    a = Fraction(k, l + 1)
    exact = 1 - 2 * simplex_volume_at(k, a)
    return BoundResult(
        constant=constant_for(setting, l),
        side=BoundSide.LOWER,
        k=k,
        l=l,
        value=float(exact),
        exact_value=exact,
        method=BoundMethod.STRIPE,
        params={"a": str(a)},
    )


def sweep_optimal_a(k: int, l: int = 2, cfg: Optional[SolverConfig] = None, progress: bool = False) -> SweepResult:
    """
    Maximize stripe_volume(k, a, l) over a in (0, k/l]. The grid at
    cfg.sweep_grid_step is scanned exactly, first at every stride-th point and
    then at every point within one stride of the best sample; golden-section
    refinement then runs over the best cell and its two neighbours.
    """
    cfg = cfg or SolverConfig()
    _check_k(k)
    _check_l(l)
    if k > cfg.sweep_max_k:
        raise InvalidParameterError(f"sweep is capped at k <= {cfg.sweep_max_k}, got k={k}")

    top = Fraction(k, l)
    step = Fraction(repr(cfg.sweep_grid_step))
    count = int(top // step)
    grid = [step * j for j in range(1, count + 1)]
    if not grid or grid[-1] != top:
        grid.append(top)

    # volumes share the denominator k! * q^k, so the lost mass is compared as an integer
    q = math.lcm(step.denominator, l)
    scale = math.factorial(k) * q**k
    lost: Dict[int, int] = {}

    def scan(indices: List[int], label: str) -> None:
        for idx in tqdm(indices, desc=f"   Sweep k={k} {label}", unit="pt", disable=not progress, leave=False):
            if idx not in lost:
                p = int(grid[idx] * q)
                upper = min(l * p, k * q)
                lost[idx] = scaled_simplex_volume(k, p, q) + scaled_simplex_volume(k, k * q - upper, q)

    stride = max(1, len(grid) // SWEEP_COARSE_POINTS)
    coarse = list(range(0, len(grid), stride))
    if coarse[-1] != len(grid) - 1:
        coarse.append(len(grid) - 1)
    scan(coarse, "coarse")
    centre = min(coarse, key=lost.__getitem__)
    scan(list(range(max(0, centre - stride), min(len(grid), centre + stride + 1))), "fine")
    best = min(sorted(lost), key=lost.__getitem__)

    lo = grid[best - 1] if best > 0 else Fraction(0)
    hi = grid[best + 1] if best + 1 < len(grid) else top
    a_opt, volume = float(grid[best]), float(1 - Fraction(lost[best], scale))

    refined_a, refined_volume = golden_section_max(
        lambda x: stripe_volume_float(k, x, l), float(lo), float(hi), cfg.sweep_refinement_iters
    )
    if refined_volume > volume:
        a_opt, volume = refined_a, refined_volume

    reference_a = Fraction(k, l + 1)
    reference_volume = float(stripe_volume(k, reference_a, l))
    if reference_volume > volume:
        a_opt, volume = float(reference_a), reference_volume

    return SweepResult(
        k=k,
        l=l,
        a_opt=a_opt,
        volume=volume,
        reference_a=float(reference_a),
        reference_volume=reference_volume,
        offset=a_opt - float(reference_a),
        grid_points=len(grid),
    )


def sweep_bound(k: int, l: int = 2, cfg: Optional[SolverConfig] = None, setting: Setting = Setting.DISCRETE) -> BoundResult:
    result = sweep_optimal_a(k, l, cfg)
    return BoundResult(
        constant=constant_for(setting, l),
        side=BoundSide.LOWER,
        k=k,
        l=l,
        value=result.volume,
        method=BoundMethod.SWEEP,
        params={"a_opt": result.a_opt, "offset": result.offset},
    )


def sign_change_sequence(terms: int) -> List[float]:
    """a_0 = 1/3, a_{i+1} = 1/3 - a_i^a_i (1-a_i)^(1-a_i) / e; stops after the first a_i <= 0."""
    if not 1 <= terms <= SEQUENCE_MAX_TERMS:
        raise InvalidParameterError(f"terms must lie in [1, {SEQUENCE_MAX_TERMS}], got {terms}")
    seq = [1.0 / 3.0]
    while len(seq) < terms and seq[-1] > 0:
        a = seq[-1]
        seq.append(1.0 / 3.0 - a**a * (1.0 - a) ** (1.0 - a) / math.e)
    return seq


corollary_sequence = sign_change_sequence


def first_nonpositive_index(seq: List[float]) -> Optional[int]:
    for i, value in enumerate(seq):
        if value <= 0:
            return i
    return None


# -------------------------------------------------
# PART 4: FIXED-POINT UPPER BOUND (pair counting)
# -------------------------------------------------
def statement_residual(k: int, alpha: float) -> float:
    """(2-2a)(1 + sum_{i=0}^{k} L^i/i!) - a with L = ln(1/(2-2a))."""
    beta = 2.0 - 2.0 * alpha
    log_inv = -math.log(beta)
    return beta * (1.0 + partial_exp_sum(log_inv, k)) - alpha


def proof_residual(k: int, beta: float) -> float:
    """(1 - beta/2) - f(beta), f(beta) = beta * sum_{i=0}^{k-1} L^i/i!."""
    log_inv = -math.log(beta)
    return (1.0 - beta / 2.0) - beta * partial_exp_sum(log_inv, k - 1)


def alpha_star(eq: UpperBoundEquation, cfg: Optional[SolverConfig] = None, setting: Setting = Setting.DISCRETE) -> BoundResult:
    cfg = cfg or SolverConfig()
    k = eq.k
    params: Dict[str, Any] = {
        "equation_variant": eq.variant.value,
        "variant_discrepancy": VARIANT_DISCREPANCY_NOTE,
    }
    if eq.variant == EquationVariant.STATED_FORM:
        alpha = bisect_root(
            lambda x: statement_residual(k, x),
            0.5 + ALPHA_LOWER_GUARD,
            1.0 - ALPHA_UPPER_GUARD,
            cfg,
        )
        params["residual"] = statement_residual(k, alpha)
    else:
        beta = bisect_root(lambda b: proof_residual(k, b), 2.0 * ALPHA_UPPER_GUARD, 1.0, cfg)
        alpha = 1.0 - beta / 2.0
        params["beta"] = beta
        params["residual"] = proof_residual(k, beta)
    return BoundResult(
        constant=constant_for(setting, 2),
        side=BoundSide.UPPER,
        k=k,
        l=2,
        value=alpha,
        method=BoundMethod.FIXED_POINT,
        params=params,
    )


def wedge_volume(k: int, beta: float) -> float:
    """Volume fraction of the corner where the coordinate product exceeds beta."""
    return log_wedge_complement(k, beta)


# -------------------------------------------------
# PART 5: ITERATED MAP (continuous setting)
# -------------------------------------------------
def phi_map(k: int, alpha: float) -> float:
    _check_k(k)
    if not 0.5 <= alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in [1/2, 1), got {alpha}")
    beta = 2.0 - 2.0 * alpha
    log_inv = -math.log(beta)
    return alpha / beta - partial_exp_sum(log_inv, k - 1, start=1)


def psi_tail(k: int, log_inv: float, cfg: SolverConfig) -> float:
    """sum_{i>=k} L^i/i!, summed term by term (never as e^L minus a partial sum)."""
    if log_inv <= 0:
        return 0.0
    term = 1.0
    for i in range(1, k + 1):
        term *= log_inv / i
    terms = [term]
    total = term
    i = k
    while i - k < SERIES_MAX_TERMS:
        i += 1
        term *= log_inv / i
        terms.append(term)
        total += term
        if i > log_inv and term <= cfg.series_term_floor * total:
            break
    return math.fsum(terms)


def psi(k: int, alpha: float, cfg: Optional[SolverConfig] = None) -> float:
    cfg = cfg or SolverConfig()
    beta = 2.0 - 2.0 * alpha
    return 0.5 - alpha + psi_tail(k, -math.log(beta), cfg)


def alpha_double_star(k: int, cfg: Optional[SolverConfig] = None) -> BoundResult:
    """
    Root of psi_k on (1/2, 1). psi_k(1/2) = 0 with negative slope for k >= 2,
    so the bracket is found by scanning upward until psi turns positive.
    """
    cfg = cfg or SolverConfig()
    _check_k(k)
    if k == 1:
        # psi_1 > 0 on all of (1/2, 1): every alpha > 1/2 escapes
        return BoundResult(
            constant=BoundConstant.C_TILDE_K,
            side=BoundSide.UPPER,
            k=k,
            value=0.5,
            method=BoundMethod.ITERATED_MAP,
            params={"residual": 0.0, "degenerate": "psi_1 has no interior root"},
        )

    f = lambda x: psi(k, x, cfg)
    upper_limit = 1.0 - ALPHA_UPPER_GUARD
    prev = 0.5 + ALPHA_LOWER_GUARD
    bracket = None
    j = 1
    while bracket is None:
        point = 0.5 + j * PSI_SCAN_STEP
        if point >= 1.0:
            break
        if f(point) > 0:
            bracket = (prev, point)
        prev = point
        j += 1

    # roots for large k sit closer to 1 than the linear scan resolves
    gap = 1.0 - prev
    while bracket is None:
        gap /= 2.0
        point = 1.0 - gap
        if point > upper_limit:
            raise RootBracketError(f"psi_{k} stayed non-positive up to alpha = {upper_limit}")
        if f(point) > 0:
            bracket = (prev, point)
        prev = point

    alpha = bisect_root(f, bracket[0], bracket[1], cfg)
    return BoundResult(
        constant=BoundConstant.C_TILDE_K,
        side=BoundSide.UPPER,
        k=k,
        value=alpha,
        method=BoundMethod.ITERATED_MAP,
        params={"residual": f(alpha)},
    )


def iterate_phi(k: int, alpha0: float, cfg: Optional[SolverConfig] = None) -> PhiTrajectory:
    cfg = cfg or SolverConfig()
    if not 0.5 <= alpha0 < 1.0:
        raise InvalidParameterError(f"alpha0 must lie in [1/2, 1), got {alpha0}")
    values = [alpha0]
    current = alpha0
    for _ in range(cfg.phi_iteration_cap):
        nxt = phi_map(k, current)
        values.append(nxt)
        if nxt >= 1.0:
            return PhiTrajectory(k=k, values=values, reason=TrajectoryStop.EXCEEDED_ONE)
        if nxt <= current:
            return PhiTrajectory(k=k, values=values, reason=TrajectoryStop.NO_ESCAPE)
        current = nxt
    return PhiTrajectory(k=k, values=values, reason=TrajectoryStop.ITERATION_CAP)


# -------------------------------------------------
# PART 6: THREE-FOLD BOUND + DISPATCH
# -------------------------------------------------
def threefold_upper_bound(k: int, setting: Setting = Setting.DISCRETE) -> BoundResult:
    _check_k(k)
    value = 1.0 - 1.0 / (1.0 + 2.0 ** (1.0 / k)) ** k
    return BoundResult(
        constant=constant_for(setting, 3),
        side=BoundSide.UPPER,
        k=k,
        l=3,
        value=value,
        method=BoundMethod.EXPLICIT_THREEFOLD,
        params={"formula": "1 - 1/(1+2^(1/k))^k"},
    )


def upper_bound_available(l: int) -> bool:
    return l in (2, 3)


def equation_variant_applies(l: int, setting: Setting) -> bool:
    """Only the discrete sumfree bound solves the fixed-point equation."""
    return l == 2 and setting == Setting.DISCRETE


def upper_bound(
    k: int,
    l: int = 2,
    setting: Setting = Setting.DISCRETE,
    variant: EquationVariant = EquationVariant.STATED_FORM,
    cfg: Optional[SolverConfig] = None,
) -> BoundResult:
    _check_k(k)
    _check_l(l)
    if l == 2:
        if setting == Setting.CONTINUOUS:
            return alpha_double_star(k, cfg)
        return alpha_star(UpperBoundEquation(k=k, variant=variant), cfg)
    if l == 3:
        return threefold_upper_bound(k, setting)
    raise UnsupportedBoundError(f"{UNSUPPORTED_FOLD_MESSAGE} (got l={l})")


def bounds_table(
    k_min: int,
    k_max: int,
    l: int = 2,
    setting: Setting = Setting.DISCRETE,
    variant: EquationVariant = EquationVariant.STATED_FORM,
    cfg: Optional[SolverConfig] = None,
    progress: bool = False,
) -> List[BoundsRow]:
    """One row per k; the upper column is left empty when l >= 4."""
    cfg = cfg or SolverConfig()
    if not 1 <= k_min <= k_max <= TABLE_MAX_K:
        raise InvalidParameterError(
            f"need 1 <= k_min <= k_max <= {TABLE_MAX_K}, got k_min={k_min}, k_max={k_max}"
        )
    _check_l(l)
    with_upper = upper_bound_available(l)

    def row_for(k: int) -> BoundsRow:
        lower = lower_bound(k, l, setting)
        upper = upper_bound(k, l, setting, variant, cfg) if with_upper else None
        return BoundsRow(k=k, lower=lower, upper=upper)

    ks = list(range(k_min, k_max + 1))
    rows: Dict[int, BoundsRow] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as ex:
        futures = {ex.submit(row_for, k): k for k in ks}
        for f in tqdm(
            concurrent.futures.as_completed(futures),
            total=len(futures),
            desc="   Bounds",
            unit="k",
            disable=not progress,
        ):
            rows[futures[f]] = f.result()
    return [rows[k] for k in ks]
