"""Closed-form K, F, Q as polynomials in the 20 coordinates A..T.

Valid only for omega = e12+e34+e56 (unit volume).  ``hats`` returns the
coefficients of -F/2 in the A..T basis, so F = -2 * hats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List

from .coeff20 import NAMES, as_list


def _unpack(c):
    return as_list(c)


def K_closed(c) -> List[list]:
    A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q, R, S, T = _unpack(c)
    col1 = [
        A*H - B*G - C*F + D*E + 2*I*J - 2*K*R + 2*L*Q - 2*M*T + 2*N*S - 2*O*P,
        -2*(A*D - B*C + I**2 - O**2),
        -2*(C*(N + T) - D*(M + S) - (I - O)*(L + R)),
        2*(A*(N + T) - B*(M + S) - (I - O)*(K + Q)),
        2*(B*(L + R) - D*(K + Q) - (I + O)*(N + T)),
        -2*(A*(L + R) - C*(K + Q) - (I + O)*(M + S)),
    ]
    col2 = [
        2*(E*H - F*G + J**2 - P**2),
        -(A*H - B*G - C*F + D*E + 2*I*J + 2*K*R - 2*L*Q + 2*M*T - 2*N*S - 2*O*P),
        -2*(G*(N + T) - H*(M + S) - (J - P)*(L + R)),
        2*(E*(N + T) - F*(M + S) - (J - P)*(K + Q)),
        2*(F*(L + R) - H*(K + Q) - (J + P)*(N + T)),
        -2*(E*(L + R) - G*(K + Q) - (J + P)*(M + S)),
    ]
    col3 = [
        -2*(E*(N - T) - F*(M - S) - (J + P)*(K - Q)),
        2*(A*(N - T) - B*(M - S) - (I + O)*(K - Q)),
        A*H - B*G + C*F - D*E - 2*I*P + 2*J*O + 2*K*L + 2*M*T - 2*N*S - 2*Q*R,
        -2*(A*F - B*E + K**2 - Q**2),
        -2*(B*(J + P) - F*(I + O) - (K + Q)*(N - T)),
        2*(A*(J + P) - E*(I + O) - (K + Q)*(M - S)),
    ]
    col4 = [
        -2*(G*(N - T) - H*(M - S) - (J + P)*(L - R)),
        2*(C*(N - T) - D*(M - S) - (I + O)*(L - R)),
        2*(C*H - D*G + L**2 - R**2),
        -(A*H - B*G + C*F - D*E + 2*I*P - 2*J*O + 2*K*L - 2*M*T + 2*N*S - 2*Q*R),
        -2*(D*(J + P) - H*(I + O) - (L + R)*(N - T)),
        2*(C*(J + P) - G*(I + O) - (L + R)*(M - S)),
    ]
    col5 = [
        2*(E*(L - R) - G*(K - Q) - (J - P)*(M - S)),
        -2*(A*(L - R) - C*(K - Q) - (I - O)*(M - S)),
        -2*(C*(J - P) - G*(I - O) - (L - R)*(M + S)),
        2*(A*(J - P) - E*(I - O) - (K - Q)*(M + S)),
        A*H + B*G - C*F - D*E + 2*I*P - 2*J*O + 2*K*R - 2*L*Q + 2*M*N - 2*S*T,
        -2*(A*G - C*E + M**2 - S**2),
    ]
    col6 = [
        2*(F*(L - R) - H*(K - Q) - (J - P)*(N - T)),
        -2*(B*(L - R) - D*(K - Q) - (I - O)*(N - T)),
        -2*(D*(J - P) - H*(I - O) - (L - R)*(N + T)),
        2*(B*(J - P) - F*(I - O) - (K - Q)*(N + T)),
        2*(B*H - D*F + N**2 - T**2),
        -(A*H + B*G - C*F - D*E - 2*I*P + 2*J*O - 2*K*R + 2*L*Q + 2*M*N - 2*S*T),
    ]
    cols = [col1, col2, col3, col4, col5, col6]
    return [[cols[j][i] for j in range(6)] for i in range(6)]


def hats(c) -> List[object]:
    """Coefficients (A^, ..., T^) of -F(phi)/2."""
    A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q, R, S, T = _unpack(c)
    hA = (A*(A*H - B*G - C*F - D*E + 2*I*J + 2*K*L + 2*M*N - 2*O*P - 2*Q*R - 2*S*T)
          - 2*(B*(M**2 - S**2) + C*(K**2 - Q**2) + E*(I**2 - O**2) - B*C*E)
          - 4*(I*K*M + O*K*S - I*Q*S - O*Q*M))
    hB = (B*(A*H - B*G + C*F + D*E + 2*I*J + 2*K*L - 2*M*N - 2*O*P - 2*Q*R + 2*S*T)
          - 2*(-A*(N**2 - T**2) + D*(K**2 - Q**2) + F*(I**2 - O**2) + A*D*F)
          - 4*(I*K*N + O*K*T - I*Q*T - O*Q*N))
    hC = (C*(A*H + B*G - C*F + D*E + 2*I*J - 2*K*L + 2*M*N - 2*O*P + 2*Q*R - 2*S*T)
          - 2*(-A*(L**2 - R**2) + D*(M**2 - S**2) + G*(I**2 - O**2) + A*D*G)
          - 4*(I*L*M + O*L*S - I*R*S - O*R*M))
    hD = (D*(-A*H - B*G - C*F + D*E + 2*I*J - 2*K*L - 2*M*N - 2*O*P + 2*Q*R + 2*S*T)
          - 2*(-B*(L**2 - R**2) - C*(N**2 - T**2) + H*(I**2 - O**2) - B*C*H)
          - 4*(I*L*N + O*L*T - I*R*T - O*R*N))
    hE = (E*(A*H + B*G + C*F - D*E - 2*I*J + 2*K*L + 2*M*N + 2*O*P - 2*Q*R - 2*S*T)
          - 2*(-A*(J**2 - P**2) + F*(M**2 - S**2) + G*(K**2 - Q**2) + A*F*G)
          - 4*(J*K*M + P*K*S - J*Q*S - P*Q*M))
    hF = (F*(-A*H - B*G + C*F - D*E - 2*I*J + 2*K*L - 2*M*N + 2*O*P - 2*Q*R + 2*S*T)
          - 2*(-B*(J**2 - P**2) + H*(K**2 - Q**2) - E*(N**2 - T**2) - B*E*H)
          - 4*(J*K*N + P*K*T - J*Q*T - P*Q*N))
    hG = (G*(-A*H + B*G - C*F - D*E - 2*I*J - 2*K*L + 2*M*N + 2*O*P + 2*Q*R - 2*S*T)
          - 2*(-C*(J**2 - P**2) - E*(L**2 - R**2) + H*(M**2 - S**2) - C*E*H)
          - 4*(J*L*M + P*L*S - J*R*S - P*R*M))
    hH = (H*(-A*H + B*G + C*F + D*E - 2*I*J - 2*K*L - 2*M*N + 2*O*P + 2*Q*R + 2*S*T)
          - 2*(-D*(J**2 - P**2) - F*(L**2 - R**2) - G*(N**2 - T**2) + D*F*G)
          - 4*(J*L*N + P*L*T - J*R*T - P*R*N))
    x1 = I*P - J*O + K*R - L*Q - M*T + N*S
    x2 = I*P - J*O + K*R - L*Q + M*T - N*S
    x3 = I*P - J*O - K*R + L*Q - M*T + N*S
    hI = (I*(A*H - B*G - C*F + D*E) - 2*J*(A*D - B*C)
          + 2*(A*(L*N - R*T) - B*(L*M - R*S) - C*(K*N - Q*T) + D*(K*M - Q*S))
          - 2*O*x1)
    hJ = (J*(-A*H + B*G + C*F - D*E) + 2*I*(E*H - F*G)
          + 2*(E*(L*N - R*T) - F*(L*M - R*S) - G*(K*N - Q*T) + H*(K*M - Q*S))
          - 2*P*x1)
    hK = (K*(A*H - B*G + C*F - D*E) - 2*L*(A*F - B*E)
          + 2*(A*(J*N + P*T) - B*(J*M + P*S) - E*(I*N + O*T) + F*(I*M + O*S))
          - 2*Q*x2)
    hL = (L*(-A*H + B*G - C*F + D*E) + 2*K*(C*H - D*G)
          + 2*(C*(J*N + P*T) - D*(J*M + P*S) - G*(I*N + O*T) + H*(I*M + O*S))
          - 2*R*x2)
    hM = (M*(A*H + B*G - C*F - D*E) - 2*N*(A*G - C*E)
          + 2*(A*(J*L - P*R) - C*(J*K - P*Q) - E*(I*L - O*R) + G*(I*K - O*Q))
          + 2*S*x3)
    hN = (N*(-A*H - B*G + C*F + D*E) + 2*M*(B*H - D*F)
          + 2*(B*(J*L - P*R) - D*(J*K - P*Q) - F*(I*L - O*R) + H*(I*K - O*Q))
          + 2*T*x3)
    hO = (O*(A*H - B*G - C*F + D*E) - 2*P*(A*D - B*C)
          - 2*(A*(L*T - R*N) - B*(L*S - R*M) - C*(K*T - Q*N) + D*(K*S - Q*M))
          - 2*I*x1)
    hP = (P*(-A*H + B*G + C*F - D*E) + 2*O*(E*H - F*G)
          - 2*(E*(L*T - R*N) - F*(L*S - R*M) - G*(K*T - Q*N) + H*(K*S - Q*M))
          - 2*J*x1)
    hQ = (Q*(A*H - B*G + C*F - D*E) - 2*R*(A*F - B*E)
          + 2*(A*(J*T + P*N) - B*(J*S + P*M) - E*(I*T + O*N) + F*(I*S + O*M))
          - 2*K*x2)
    hR = (R*(-A*H + B*G - C*F + D*E) + 2*Q*(C*H - D*G)
          + 2*(C*(J*T + P*N) - D*(J*S + P*M) - G*(I*T + O*N) + H*(I*S + O*M))
          - 2*L*x2)
    hS = (S*(A*H + B*G - C*F - D*E) - 2*T*(A*G - C*E)
          + 2*(A*(J*R - P*L) - C*(J*Q - P*K) - E*(I*R - O*L) + G*(I*Q - O*K))
          + 2*M*x3)
    hT = (T*(-A*H - B*G + C*F + D*E) + 2*S*(B*H - D*F)
          + 2*(B*(J*R - P*L) - D*(J*Q - P*K) - F*(I*R - O*L) + H*(I*Q - O*K))
          + 2*N*x3)
    return [hA, hB, hC, hD, hE, hF, hG, hH, hI, hJ, hK, hL, hM, hN, hO, hP, hQ, hR, hS, hT]


def F_closed(c) -> List[object]:
    return [-2 * h for h in hats(c)]


def Q_closed(c):
    """Q(phi) (not Q/4) from the quartic expansion."""
    A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q, R, S, T = _unpack(c)
    q4 = (2*(A**2*H**2 + B**2*G**2 + C**2*F**2 + D**2*E**2) - (A*H + B*G + C*F + D*E)**2
          + 4*(A*D*F*G + B*C*E*H)
          + 4*(I**2 - O**2)*(F*G - E*H) + 4*(J**2 - P**2)*(B*C - A*D) + 4*(I*J - O*P)*(A*H - B*G - C*F + D*E)
          + 4*(K**2 - Q**2)*(D*G - C*H) + 4*(L**2 - R**2)*(B*E - A*F) + 4*(K*L - Q*R)*(A*H - B*G + C*F - D*E)
          + 4*(M**2 - S**2)*(D*F - B*H) + 4*(N**2 - T**2)*(C*E - A*G) + 4*(M*N - S*T)*(A*H + B*G - C*F - D*E)
          + 8*A*(J*L*N - J*R*T + P*L*T - P*R*N) - 8*B*(J*L*M - J*R*S + P*L*S - P*R*M)
          - 8*C*(J*K*N - J*Q*T + P*K*T - P*Q*N) + 8*D*(J*K*M - J*Q*S + P*K*S - P*Q*M)
          - 8*E*(I*L*N - I*R*T + O*L*T - O*R*N) + 8*F*(I*L*M - I*R*S + O*L*S - O*R*M)
          + 8*G*(I*K*N - I*Q*T + O*K*T - O*Q*N) - 8*H*(I*K*M - I*Q*S + O*K*S - O*Q*M)
          + 8*((I*P - J*O)**2 + (L*Q - K*R)**2 + (M*T - N*S)**2)
          - 4*(I*P - J*O - K*R + L*Q + M*T - N*S)**2)
    return 4 * q4


def KFQ_closed_form(c, ss=None):
    """(K, F, Q) from the closed forms; ``ss`` (if given) must be the standard structure."""
    if ss is not None and not ss.is_standard:
        from .errors import UnsupportedAlgebraError

        raise UnsupportedAlgebraError(
            "closed-form K/F/Q assume omega = e12+e34+e56; use hitchin.K_def/F_def/Q_def instead"
        )
    return K_closed(c), F_closed(c), Q_closed(c)


# Q-gradient in terms of the hatted coefficients: dQ/dx = GRAD_SCALE[x] * hat[GRAD_PARTNER[x]]
GRAD_PARTNER = dict(zip("ABCDEFGHIJKLMNOPQRST", "HGFEDCBAJILKNMPORQTS"))
GRAD_SCALE = {
    "A": -8, "H": 8, "B": 8, "G": -8, "C": 8, "F": -8, "D": -8, "E": 8,
    "I": -16, "J": 16, "K": -16, "L": 16, "M": -16, "N": 16,
    "O": 16, "P": -16, "Q": 16, "R": -16, "S": 16, "T": -16,
}


def Q_gradient_closed(c) -> Dict[str, object]:
    h = dict(zip(NAMES, hats(c)))
    return {x: GRAD_SCALE[x] * h[GRAD_PARTNER[x]] for x in NAMES}


def pairing_half_Q(c, literal: bool = False):
    """Q/2 as the antisymmetric pairing of coefficients with hatted coefficients.

    With ``literal=True`` the M/N pair is written as "-2 M N^ + 2 M N^" (which
    cancels); the default uses the antisymmetric "-2 M N^ + 2 N M^".
    """
    vals = dict(zip(NAMES, as_list(c)))
    h = dict(zip(NAMES, hats(c)))
    total = 0
    for x in NAMES:
        if literal and x in "MN":
            continue
        total += GRAD_SCALE[x] * vals[x] * h[GRAD_PARTNER[x]]
    total = _div8(total)
    if literal:
        total += -2 * vals["M"] * h["N"] + 2 * vals["M"] * h["N"]
    return total


def _div8(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x) / 8
    return x / 8


def compare_with_definition(c, ss=None) -> List[tuple]:
    """Entries where the closed forms disagree with K_def/F_def/Q_def.

    Each entry is (label, closed_value, definitional_value); labels are
    "K[i][j]", "F.<name>" or "Q".  An empty list means full agreement.
    """
    from .coeff20 import from_form, to_form
    from .hitchin import KFQ_def
    from .symplectic import standard_structure

    ss = ss or standard_structure()
    Kc, Fc, Qc = KFQ_closed_form(c, ss)
    Kd, Fd, Qd = KFQ_def(ss, to_form(c))
    out = []
    for i in range(6):
        for j in range(6):
            if Kc[i][j] != Kd[i][j]:
                out.append((f"K[{i}][{j}]", Kc[i][j], Kd[i][j]))
    for name, x, y in zip(NAMES, Fc, from_form(Fd)):
        if x != y:
            out.append((f"F.{name}", x, y))
    if Qc != Qd:
        out.append(("Q", Qc, Qd))
    return out
