"""The Type IIA flow d/dt phi = d Lambda d F(phi) on invariant 3-forms.

The generic right-hand side works for any algebra.  Integration runs on the
20 coordinates A..T of the standard symplectic basis; only the 14 primitive
coordinates move (the flow is d-exact of a primitive kind), so O..T are
carried along untouched.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import RK45

from . import coeff20, lemmas
from .catalog import is_nilpotent_example
from .errors import (
    ConsistencyError,
    IntegrationIntegrityError,
    PreconditionError,
    UnsupportedAlgebraError,
)
from .exterior import DIM, KForm, interior
from .hitchin import F_def, NumericHitchin
from .lie_algebra import LieAlgebraSpec, parse_salamon, subspace_is_ideal
from .linalg import nullspace
from .symplectic import STANDARD_OMEGA, SymplecticStructure, _is_exact, lambda_matrix, lefschetz_Lambda, make_symplectic

log = logging.getLogger(__name__)

N_PRIM = 14


# right-hand side ---------------------------------------------------------------

def flow_rhs(spec: LieAlgebraSpec, ss: SymplecticStructure, phi: KForm) -> KForm:
    """d Lambda d F(phi), evaluated with the definitional F."""
    return spec.d(lefschetz_Lambda(ss, spec.d(F_def(ss, phi))))


def flow_operator(spec: LieAlgebraSpec, ss: SymplecticStructure) -> List[list]:
    """The linear part d o Lambda o d on 3-forms, as a 20x20 matrix in blade coordinates."""
    d3 = spec.d_matrix(3)
    lam4 = lambda_matrix(ss, 4)
    d2 = spec.d_matrix(2)

    def mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(len(b)) if a[i][k] and b[k][j]) for j in range(len(b[0]))]
                for i in range(len(a))]

    return mul(d2, mul(lam4, d3))


class NumericFlow:
    """Float evaluation of the flow in A..T coordinates (standard omega only)."""

    def __init__(self, spec: LieAlgebraSpec, ss: SymplecticStructure):
        if not ss.is_standard:
            raise UnsupportedAlgebraError(
                "flow integration works in the A..T coordinates, which need omega = e12+e34+e56"
            )
        self.spec = spec
        self.ss = ss
        self.hitchin = NumericHitchin(ss)
        op = np.array([[float(x) for x in row] for row in flow_operator(spec, ss)])
        self.G = coeff20.FROM_BLADES_F @ op

    def rate(self, c: np.ndarray) -> np.ndarray:
        v = coeff20.TO_BLADES_F @ c
        return self.G @ self.hitchin.F(v)

    def Q(self, c: np.ndarray) -> float:
        return self.hitchin.Q(coeff20.TO_BLADES_F @ c)


# configuration and results ----------------------------------------------------

@dataclass(frozen=True)
class FlowConfig:
    dt0: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    t_max: float = 10.0
    blowup_threshold: float = 1e12
    sample_stride: int = 1
    max_step: float = math.inf
    min_step: float = 1e-14
    conv_tol: float = 1e-12
    conv_steps: int = 20
    stop_on_convergence: bool = True
    max_steps: int = 1_000_000

    def __post_init__(self):
        for name in ("dt0", "rtol", "atol", "t_max", "blowup_threshold", "max_step", "min_step", "conv_tol"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"FlowConfig.{name} must be positive")
        for name in ("sample_stride", "conv_steps", "max_steps"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"FlowConfig.{name} must be >= 1")

    @classmethod
    def from_mapping(cls, m: Mapping[str, object]) -> "FlowConfig":
        known = {k: m[k] for k in cls.__dataclass_fields__ if k in m}
        return cls(**known)


@dataclass
class FlowOutcome:
    kind: str  # converged | linear_divergent | blow_up | horizon_reached
    t_end: float
    limit: Optional[List[float]] = None
    direction: Optional[List[float]] = None
    T_est: Optional[float] = None
    normalized_limit: Optional[List[float]] = None
    note: str = ""

    def to_dict(self) -> Dict[str, object]:
        out = {"kind": self.kind, "t_end": self.t_end}
        for key in ("limit", "direction", "T_est", "normalized_limit"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class FlowTrajectory:
    times: List[float]
    states: List[np.ndarray]
    rhs_norms: List[float]
    outcome: Optional[FlowOutcome] = None
    n_steps: int = 0
    Q: List[float] = field(default_factory=list)

    @property
    def samples(self) -> List[Tuple[float, np.ndarray]]:
        return list(zip(self.times, self.states))

    def coefficient(self, name: str) -> np.ndarray:
        i = coeff20.INDEX[name]
        return np.array([s[i] for s in self.states])

    def set_outcome(self, outcome: FlowOutcome) -> None:
        if self.outcome is not None:
            raise IntegrationIntegrityError("trajectory outcome already set")
        self.outcome = outcome


# generic RK45 driver ----------------------------------------------------------

@dataclass
class _RunResult:
    times: List[float]
    states: List[np.ndarray]
    rates: List[np.ndarray]
    status: str  # horizon | blow_up | converged
    n_steps: int
    history: List[Tuple[float, np.ndarray, np.ndarray]]


def _run(fun: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray, cfg: FlowConfig,
         size: Optional[Callable[[np.ndarray], float]] = None) -> _RunResult:
    size = size or (lambda y: float(np.max(np.abs(y))) if y.size else 0.0)
    y0 = np.asarray(y0, dtype=float)
    f0 = np.asarray(fun(0.0, y0), dtype=float)
    times, states, rates = [0.0], [y0.copy()], [f0]
    history = [(0.0, y0.copy(), f0)]
    if y0.size == 0:
        return _RunResult(times, states, rates, "horizon", 0, history)
    solver = RK45(fun, 0.0, y0, cfg.t_max, rtol=cfg.rtol, atol=cfg.atol,
                  first_step=min(cfg.dt0, cfg.t_max), max_step=cfg.max_step)
    size0 = max(size(y0), 1.0)
    quiet = 0
    steps = 0
    status = "horizon"
    while solver.status == "running":
        if steps >= cfg.max_steps:
            raise IntegrationIntegrityError(f"step budget of {cfg.max_steps} exhausted at t={solver.t}")
        msg = solver.step()
        if solver.status == "failed":
            if size(solver.y) > 1e3 * size0:
                status = "blow_up"
                break
            raise IntegrationIntegrityError(f"step size underflow at t={solver.t} without growth ({msg}); stiff system?")
        steps += 1
        y = solver.y
        f = solver.f
        history.append((solver.t, y.copy(), np.array(f)))
        if len(history) > 4:
            history.pop(0)
        keep = steps % cfg.sample_stride == 0
        big = not np.all(np.isfinite(y)) or size(y) > cfg.blowup_threshold
        tiny = solver.status == "running" and solver.step_size < cfg.min_step
        if keep or big or tiny or solver.status != "running":
            times.append(solver.t)
            states.append(y.copy())
            rates.append(np.array(f))
        if big or tiny:
            if tiny and size(y) <= 1e3 * size0:
                raise IntegrationIntegrityError(f"step size {solver.step_size:g} below minimum at t={solver.t} without growth")
            status = "blow_up"
            break
        if float(np.max(np.abs(f))) < cfg.conv_tol:
            quiet += 1
            if cfg.stop_on_convergence and quiet >= cfg.conv_steps:
                status = "converged"
                break
        else:
            quiet = 0
    if status == "horizon" and float(np.max(np.abs(rates[-1]))) < cfg.conv_tol:
        status = "converged"
    return _RunResult(times, states, rates, status, steps, history)


def estimate_blowup_time(history: Sequence[Tuple[float, np.ndarray, np.ndarray]]) -> float:
    """Extrapolate the singular time from the last accepted steps.

    With y = max|coeff| ~ c (T - t)^(-p), g = y / y' = (T - t) / p is linear in
    t; the zero of the line through the last two g values estimates T.
    """
    pts = []
    for t, y, f in history[-3:]:
        i = int(np.argmax(np.abs(y)))
        yi, fi = abs(y[i]), f[i] * np.sign(y[i])
        if fi > 0:
            pts.append((t, yi / fi))
    if len(pts) < 2:
        return history[-1][0]
    (t1, g1), (t2, g2) = pts[-2], pts[-1]
    if t2 == t1:
        return t2 + g2
    s = (g2 - g1) / (t2 - t1)
    if s >= 0:
        return t2
    return t2 - g2 / s


def _linear_direction(rates: List[np.ndarray], times: List[float], rel: float = 1e-6) -> Optional[np.ndarray]:
    end = rates[-1]
    scale = float(np.max(np.abs(end)))
    if scale == 0:
        return None
    t_mid = times[-1] / 2
    mid = min(range(len(times)), key=lambda k: abs(times[k] - t_mid))
    if float(np.max(np.abs(rates[mid] - end))) > rel * scale:
        return None
    i = int(np.argmax(np.abs(end)))
    return end / end[i]


def integrate(spec: LieAlgebraSpec, ss: SymplecticStructure, phi0, cfg: FlowConfig = FlowConfig(),
              numeric: Optional[NumericFlow] = None) -> FlowTrajectory:
    """Integrate the flow from Coeff20 data ``phi0`` (sequence or name mapping)."""
    nf = numeric or NumericFlow(spec, ss)
    c0 = np.array([float(x) for x in coeff20.as_list(phi0)])
    tail = c0[N_PRIM:].copy()

    def full(y):
        return np.concatenate([y, tail])

    def fun(t, y):
        return nf.rate(full(y))[:N_PRIM]

    run = _run(fun, c0[:N_PRIM], cfg)
    states = [full(y) for y in run.states]
    traj = FlowTrajectory(
        times=run.times,
        states=states,
        rhs_norms=[float(np.linalg.norm(r)) for r in run.rates],
        n_steps=run.n_steps,
        Q=[nf.Q(s) for s in states],
    )
    t_end = run.times[-1]
    last = states[-1]
    if run.status == "blow_up":
        T = estimate_blowup_time([(t, full(y), np.concatenate([f, np.zeros(6)])) for t, y, f in run.history])
        i = int(np.argmax(np.abs(last)))
        traj.set_outcome(FlowOutcome("blow_up", t_end, T_est=T, normalized_limit=(last / last[i]).tolist()))
    elif run.status == "converged":
        traj.set_outcome(FlowOutcome("converged", t_end, limit=last.tolist()))
    else:
        direction = _linear_direction(run.rates, run.times)
        if direction is not None:
            traj.set_outcome(FlowOutcome("linear_divergent", t_end,
                                         direction=np.concatenate([direction, np.zeros(6)]).tolist()))
        else:
            traj.set_outcome(FlowOutcome("horizon_reached", t_end))
    return traj


# nilpotent example: closed-form solution -----------------------------------------

def R_nilpotent(c) -> object:
    """The constant term of dA/dt = 4 H^ = -4 A H^2 + R, i.e. 4 H^ at A = 0."""
    vals = list(coeff20.as_list(c))
    vals[0] = 0
    return 4 * lemmas.hats(vals)[7]


def R_nilpotent_printed(c) -> object:
    """The constant exactly as printed in the source formula (carries a -2ST sign slip)."""
    A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q, R, S, T = coeff20.as_list(c)
    return (4 * H * (B*G + C*F + D*E - 2*I*J - 2*K*L - 2*M*N + 2*O*P + 2*Q*R - 2*S*T)
            + 8 * (D*(J**2 - P**2) + F*(L**2 - R**2) + G*(N**2 - T**2) - D*F*G
                   - 2*J*L*N - 2*P*L*T + 2*J*R*T + 2*P*R*N))


@dataclass(frozen=True)
class NilpotentSolution:
    H: object
    R: object
    A0: object
    R_printed: object

    @property
    def converges(self) -> bool:
        return self.H != 0 or self.R == 0

    @property
    def outcome(self) -> str:
        return "converged" if self.converges else "linear_divergent"

    @property
    def limit_A(self):
        if self.H != 0:
            k = 4 * self.H * self.H
            return Fraction(self.R) / k if _is_exact(self.R) and _is_exact(k) else self.R / k
        return self.A0 if self.R == 0 else None

    def A(self, t: float) -> float:
        H, R, A0 = float(self.H), float(self.R), float(self.A0)
        if H == 0:
            return A0 + R * t
        k = 4 * H * H
        return A0 * math.exp(-k * t) - R * math.expm1(-k * t) / k

    def A_array(self, t: np.ndarray) -> np.ndarray:
        return np.array([self.A(float(x)) for x in np.asarray(t)])


def nilpotent_exact(phi0, spec: Optional[LieAlgebraSpec] = None) -> NilpotentSolution:
    if spec is not None and not is_nilpotent_example(spec):
        raise UnsupportedAlgebraError("the closed-form solution is only available for (0,0,0,e15,0,e13)")
    c = coeff20.as_list(phi0)
    return NilpotentSolution(H=c[7], R=R_nilpotent(c), A0=c[0], R_printed=R_nilpotent_printed(c))


# solvable example: reduced systems ------------------------------------------------

_OTHERS = ("I", "J", "K", "L", "O", "P", "Q", "R")


@dataclass(frozen=True)
class SolvableState:
    alpha: float
    beta: float
    gamma: float
    delta: float
    M: float = 0.0
    N: float = 0.0
    S: float = 0.0
    T: float = 0.0
    primes: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    others: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_coeff20(cls, c) -> "SolvableState":
        d = coeff20.as_dict(c)
        A, B, C, D, E, F, G, H = (d[x] for x in "ABCDEFGH")
        half = (lambda x: Fraction(x) / 2) if all(_is_exact(d[x]) for x in "ABCDEFGH") else (lambda x: x / 2)
        return cls(
            alpha=half(A + B), beta=half(C - D), gamma=half(E - F), delta=-half(G + H),
            M=d["M"], N=d["N"], S=d["S"], T=d["T"],
            primes=(half(A - B), half(C + D), half(E + F), half(G - H)),
            others={k: d[k] for k in _OTHERS},
        )

    def to_coeff20(self) -> list:
        a, b, g, dl = self.alpha, self.beta, self.gamma, self.delta
        a1, b1, g1, d1 = self.primes
        vals = dict(A=a + a1, B=a - a1, C=b + b1, D=b1 - b, E=g + g1, F=g1 - g, G=d1 - dl, H=-dl - d1,
                    M=self.M, N=self.N, S=self.S, T=self.T)
        vals.update({k: self.others.get(k, 0) for k in _OTHERS})
        return coeff20.as_list(vals)

    def with_variables(self, y: Sequence[float]) -> "SolvableState":
        return SolvableState(y[0], y[1], y[2], y[3], self.M, self.N, self.S, self.T, self.primes, self.others)

    @property
    def variables(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.delta], dtype=float)

    @property
    def is_closed_primitive(self) -> bool:
        return all(x == 0 for x in self.primes) and self.S == 0 and self.T == 0 and \
            all(self.others.get(k, 0) == 0 for k in _OTHERS)

    @property
    def u(self):
        return 4 * self.alpha * self.delta

    @property
    def v(self):
        return 4 * self.beta * self.gamma


def _displayed_system(s: SolvableState, y=None) -> list:
    """The right-hand sides of the expanded system divided by 4 lambda^2, without R_i."""
    a, b, g, d = (s.alpha, s.beta, s.gamma, s.delta) if y is None else y
    a1, b1, g1, d1 = s.primes
    o = {k: s.others.get(k, 0) for k in _OTHERS}
    I, J, K, L, O, P, Q, R = (o[k] for k in _OTHERS)
    M, N, S, T = s.M, s.N, s.S, s.T
    mn_minus = (M - N) ** 2 - (S - T) ** 2
    mn_plus = (M + N) ** 2 - (S + T) ** 2
    return [
        4*a*b*g - a*mn_minus - 2*b*(K*K - Q*Q) - 2*g*(I*I - O*O) - 2*a1*(a*d1 + b*g1 + g*b1 + d*a1),
        4*a*b*d - b*mn_plus - 2*a*(L*L - R*R) - 2*d*(I*I - O*O) - 2*b1*(-a*d1 - b*g1 + g*b1 + d*a1),
        4*a*g*d - g*mn_plus - 2*a*(J*J - P*P) - 2*d*(K*K - Q*Q) - 2*g1*(-a*d1 + b*g1 - g*b1 + d*a1),
        4*b*g*d - d*mn_minus - 2*b*(J*J - P*P) - 2*g*(L*L - R*R) - 2*d1*(a*d1 - b*g1 - g*b1 + d*a1),
    ]


def _hat_rates(s: SolvableState) -> list:
    """(A^-B^)/2, -(C^+D^)/2, -(E^+F^)/2, -(G^-H^)/2: the exact rates divided by 4 lambda^2."""
    h = lemmas.hats(s.to_coeff20())
    two = Fraction(2) if all(_is_exact(x) for x in h) else 2.0
    return [(h[0] - h[1]) / two, -(h[2] + h[3]) / two, -(h[4] + h[5]) / two, -(h[6] - h[7]) / two]


def solvable_constants(s: SolvableState) -> list:
    """R_1..R_4 of the expanded system, evaluated from the given data."""
    return [x - y for x, y in zip(_hat_rates(s), _displayed_system(s))]


def solvable_reduced_rhs(state: SolvableState, lam: float, closed_primitive: bool = True,
                         R: Optional[Sequence[float]] = None) -> np.ndarray:
    """d/dt (alpha, beta, gamma, delta) from the reduced systems."""
    k = 4 * lam * lam
    a, b, g, d = state.alpha, state.beta, state.gamma, state.delta
    if closed_primitive:
        if not state.is_closed_primitive:
            raise PreconditionError("state is not closed and primitive; use closed_primitive=False")
        mm, pp = (state.M - state.N) ** 2, (state.M + state.N) ** 2
        return np.array([
            k * a * (4 * b * g - mm),
            k * b * (4 * a * d - pp),
            k * g * (4 * a * d - pp),
            k * d * (4 * b * g - mm),
        ], dtype=float)
    R = solvable_constants(state) if R is None else R
    return np.array([k * (x + r) for x, r in zip(_displayed_system(state), R)], dtype=float)


def solvable_flow_spec(lam: float) -> Tuple[LieAlgebraSpec, SymplecticStructure]:
    spec = parse_salamon("(-λ e15, λ e25, -λ e36, λ e46, 0, 0)", {"λ": lam}, name="solvable")
    return spec, make_symplectic(STANDARD_OMEGA, spec)


@dataclass
class ReducedTrajectory:
    times: List[float]
    states: List[np.ndarray]
    status: str
    T_est: Optional[float] = None


def integrate_solvable(state0: SolvableState, lam: float, cfg: FlowConfig = FlowConfig(),
                       closed_primitive: bool = True) -> ReducedTrajectory:
    R = None if closed_primitive else solvable_constants(state0)

    def fun(t, y):
        return solvable_reduced_rhs(state0.with_variables(y), lam, closed_primitive, R)

    run = _run(fun, state0.variables, cfg)
    T = estimate_blowup_time(run.history) if run.status == "blow_up" else None
    return ReducedTrajectory(run.times, run.states, run.status, T)


# positivity -----------------------------------------------------------------------

def positivity_matrix(s: SolvableState) -> np.ndarray:
    a, b, g, d, M, N = (float(x) for x in (s.alpha, s.beta, s.gamma, s.delta, s.M, s.N))
    return np.array([
        [2*a*b, 0, a*(N - M), b*(M + N), 0, 0],
        [0, 2*g*d, g*(M + N), d*(M - N), 0, 0],
        [a*(N - M), g*(M + N), 2*a*g, 0, 0, 0],
        [b*(M + N), d*(M - N), 0, 2*b*d, 0, 0],
        [0, 0, 0, 0, a*d + b*g - M*M, a*d - b*g - M*N],
        [0, 0, 0, 0, a*d - b*g - M*N, a*d + b*g - N*N],
    ])


def leading_minors(m: np.ndarray) -> List[float]:
    return [float(np.linalg.det(m[:k, :k])) for k in range(1, m.shape[0] + 1)]


def positivity_inequalities(s: SolvableState) -> bool:
    a, b, g, d, M, N = s.alpha, s.beta, s.gamma, s.delta, s.M, s.N
    same_sign = (a > 0 and b > 0 and g > 0 and d > 0) or (a < 0 and b < 0 and g < 0 and d < 0)
    q16 = -4*a*b*g*d + a*d*(M - N)**2 + b*g*(M + N)**2
    return bool(same_sign and a*d + b*g > M*M and a*d + b*g > N*N and q16 < 0)


def positivity_check(s: SolvableState) -> bool:
    """Sylvester test on the 6x6 matrix, cross-checked against the inequality system."""
    if not s.is_closed_primitive:
        raise PreconditionError("positivity is defined here for closed primitive states")
    by_matrix = all(x > 0 for x in leading_minors(positivity_matrix(s)))
    by_ineq = positivity_inequalities(s)
    if by_matrix != by_ineq:
        log.error("positivity disagreement at %r: matrix=%s inequalities=%s", s, by_matrix, by_ineq)
        raise ConsistencyError(f"matrix test ({by_matrix}) and inequalities ({by_ineq}) disagree at {s}")
    return by_ineq


# blow-up analysis -----------------------------------------------------------------

PRINTED_UV_CONSTANT = 2.0  # the lambda^2 multiplier printed in the (u, v) system


def T_prime(k: float, S: float, C0: float, w0: float) -> Optional[float]:
    """Blow-up time of w for du/dt = k u (v - S), dv/dt = k v (u - S); None if no finite bound."""
    if w0 <= 0:
        return None
    ratio = (w0 - C0) / w0
    if ratio <= 0:
        return None
    x = -math.log(ratio) / C0 if C0 != 0 else 1.0 / w0
    if S == 0:
        return x / k
    arg = 1 - S * x
    if arg <= 0:
        return None
    return -math.log(arg) / (k * S)


def T_prime_printed_second_line(lam: float, s: SolvableState) -> Optional[float]:
    """The alternative printed form using alpha0 delta0 - beta0 gamma0 in place of C_0."""
    S = max((s.M + s.N) ** 2, (s.M - s.N) ** 2)
    c = s.alpha * s.delta - s.beta * s.gamma
    k = PRINTED_UV_CONSTANT * lam * lam
    ratio = 1 - c / (s.alpha * s.delta)
    if ratio <= 0:
        return None
    x = -math.log(ratio) / c if c != 0 else 1.0 / (s.alpha * s.delta)
    if S == 0:
        return x / k
    arg = 1 - S * x
    return None if arg <= 0 else -math.log(arg) / (k * S)


@dataclass
class BlowupReport:
    T_numeric: float
    T_prime: Optional[float]
    T_prime_printed: Optional[float]
    T_prime_printed_second_line: Optional[float]
    uv_ratio: List[Tuple[float, float]]
    normalized_limit: List[float]
    limit_variables: Tuple[float, float, float, float]
    acs_residual: float
    uv_constant_measured: float
    uv_constant_printed: float
    uv_factor: float
    uvnormal_max_rel_error: float
    strengthened: List[Tuple[float, float]]
    positive_throughout: bool
    n_samples: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "T_numeric": self.T_numeric,
            "T_prime": self.T_prime,
            "T_prime_printed": self.T_prime_printed,
            "T_prime_printed_second_line": self.T_prime_printed_second_line,
            "uv_ratio_final": self.uv_ratio[-1][1],
            "normalized_limit": self.normalized_limit,
            "limit_variables": list(self.limit_variables),
            "acs_residual": self.acs_residual,
            "uv_constant_measured": self.uv_constant_measured,
            "uv_constant_printed": self.uv_constant_printed,
            "uv_factor": self.uv_factor,
            "uvnormal_max_rel_error": self.uvnormal_max_rel_error,
            "positive_throughout": self.positive_throughout,
            "n_samples": self.n_samples,
        }


def measure_uv_constant(lam: float, s: SolvableState, numeric: Optional[NumericFlow] = None) -> float:
    """c in du/dt = c lambda^2 u (v - (M-N)^2), measured on the full 20-coefficient flow."""
    nf = numeric or NumericFlow(*solvable_flow_spec(lam))
    c = np.array([float(x) for x in s.to_coeff20()])
    r = nf.rate(c)
    rate = SolvableState.from_coeff20(r.tolist())
    du = 4 * (rate.alpha * s.delta + s.alpha * rate.delta)
    return float(du / (lam * lam * s.u * (s.v - (s.M - s.N) ** 2)))


def _uvnormal_check(k: float, S: float, u0: float, v0: float, t_end: float, cfg: FlowConfig) -> float:
    """Integrate the comparison system on its own and compare u - v with C0 exp(-k S t)."""
    C0 = u0 - v0

    def fun(t, y):
        u, v = y
        return np.array([k * u * (v - S), k * v * (u - S)])

    run = _run(fun, np.array([u0, v0], dtype=float),
               FlowConfig(t_max=t_end, rtol=1e-11, atol=1e-12, dt0=min(cfg.dt0, t_end / 10),
                          blowup_threshold=1e8, max_step=t_end / 50))
    errs = []
    for t, y in zip(run.times, run.states):
        exact = C0 * math.exp(-k * S * t)
        errs.append(abs((y[0] - y[1]) - exact) / max(abs(y[0]), 1.0))
    return max(errs)


def blowup_analysis(state0: SolvableState, lam: float, cfg: FlowConfig = FlowConfig(t_max=10.0),
                    numeric: Optional[NumericFlow] = None) -> BlowupReport:
    if not positivity_check(state0):
        raise PreconditionError("initial data is not positive")
    if state0.alpha < 0:
        raise PreconditionError("take the all-positive representative (flip the sign of phi)")
    traj = integrate_solvable(state0, lam, cfg)
    if traj.status != "blow_up":
        raise IntegrationIntegrityError(f"expected a finite-time singularity, got {traj.status}")
    positive = True
    for y in traj.states:
        s = state0.with_variables(y)
        if not positivity_inequalities(s):
            positive = False
            raise IntegrationIntegrityError(f"positivity lost along the flow at {s}")
    uv = []
    strengthened = []
    for t, y in zip(traj.times, traj.states):
        u, v = 4 * y[0] * y[3], 4 * y[1] * y[2]
        uv.append((float(t), float(u / v)))
        strengthened.append((float(t), float((u - v) ** 2 / u)))
    a, b, g, d = (float(x) for x in traj.states[-1])
    lim = (1.0, b / a, g / a, d / a)
    acs = abs(lim[0] * lim[3] - lim[1] * lim[2]) / (lim[0] * lim[3])
    limit_state = SolvableState(*lim, M=0.0, N=0.0)
    normalized = [float(x) for x in limit_state.to_coeff20()]
    normalized[coeff20.INDEX["M"]] = float(state0.M) / a
    normalized[coeff20.INDEX["N"]] = float(state0.N) / a

    k_true = measure_uv_constant(lam, state0, numeric)
    factor = k_true / PRINTED_UV_CONSTANT
    if abs(factor - 1) > 1e-9:
        log.warning("(u, v) system constant: measured %.12g lambda^2, printed %g lambda^2 (factor %.12g)",
                    k_true, PRINTED_UV_CONSTANT, factor)
    S = max((state0.M + state0.N) ** 2, (state0.M - state0.N) ** 2)
    u0, v0 = float(state0.u), float(state0.v)
    C0 = u0 - v0
    lam2 = lam * lam
    Tp = T_prime(k_true * lam2, S, C0, u0)
    Tp_printed = T_prime(PRINTED_UV_CONSTANT * lam2, S, C0, u0)
    horizon = Tp if Tp is not None else traj.times[-1]
    uvn = _uvnormal_check(k_true * lam2, S, u0, v0, 0.9 * horizon, cfg)
    return BlowupReport(
        T_numeric=float(traj.T_est),
        T_prime=Tp,
        T_prime_printed=Tp_printed,
        T_prime_printed_second_line=T_prime_printed_second_line(lam, state0),
        uv_ratio=uv,
        normalized_limit=normalized,
        limit_variables=lim,
        acs_residual=acs,
        uv_constant_measured=k_true,
        uv_constant_printed=PRINTED_UV_CONSTANT,
        uv_factor=factor,
        uvnormal_max_rel_error=float(uvn),
        strengthened=strengthened,
        positive_throughout=positive,
        n_samples=len(traj.times),
    )


def symmetric_blowup_time(lam: float) -> float:
    """All four variables equal to 1 and M = N = 0: f' = 16 lam^2 f^3, f = (1 - 32 lam^2 t)^(-1/2)."""
    return 1.0 / (32 * lam * lam)


# limit geometry -------------------------------------------------------------------

@dataclass
class LimitGeometry:
    kernel_basis: List[list]
    is_lagrangian: bool
    is_ideal: Optional[bool]
    acs_harmonic_residual: Optional[float]

    def to_dict(self) -> Dict[str, object]:
        return {
            "kernel_basis": [[_num(x) for x in v] for v in self.kernel_basis],
            "kernel_dim": len(self.kernel_basis),
            "is_lagrangian": self.is_lagrangian,
            "is_ideal": self.is_ideal,
            "acs_harmonic_residual": self.acs_harmonic_residual,
        }


def _num(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def kernel(phi: KForm, tol: float = 1e-10) -> List[list]:
    """Basis of {v : iota_v phi = 0}."""
    cols = [interior(i, phi).to_vector() for i in range(1, DIM + 1)]
    mat = [[cols[j][r] for j in range(DIM)] for r in range(len(cols[0]))]
    if all(_is_exact(x) for row in mat for x in row):
        return nullspace(mat, DIM)
    a = np.array(mat, dtype=float)
    _, sv, vt = np.linalg.svd(a)
    rank = int(np.sum(sv > tol * max(1.0, sv.max() if sv.size else 1.0)))
    return [list(row) for row in vt[rank:]]


def limit_geometry(spec: LieAlgebraSpec, ss: SymplecticStructure, phi: KForm) -> LimitGeometry:
    if phi.is_zero():
        raise PreconditionError("limit form is zero")
    ker = kernel(phi)
    w = ss.matrix()
    lagrangian = len(ker) == 3 and all(
        abs(sum(ker[a][i] * w[i][j] * ker[b][j] for i in range(DIM) for j in range(DIM))) < 1e-12
        for a in range(3) for b in range(a + 1, 3)
    )
    ideal = subspace_is_ideal(spec, ker) if ker else None
    acs = None
    if ss.is_standard:
        c = coeff20.from_form(phi)
        if all(float(x) == 0 for x in c[8:]):
            s = SolvableState.from_coeff20(c)
            if all(float(x) == 0 for x in s.primes) and s.alpha * s.delta != 0:
                acs = float(abs(s.alpha * s.delta - s.beta * s.gamma) / abs(s.alpha * s.delta))
    return LimitGeometry(kernel_basis=ker, is_lagrangian=lagrangian, is_ideal=ideal, acs_harmonic_residual=acs)
