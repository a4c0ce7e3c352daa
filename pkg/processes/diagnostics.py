"""
Proof-internal processes, exposed for inspection

    P_n = Π_{i<n}(1+A_i)     X̃_n = X_n/P_n
    B̃_n = B_n/P_{n+1}        C̃_n = C_n/P_{n+1}
    U_n = X̃_n − Σ_{i<n} C̃_i  V_n = U_n + Σ_{i<n} B̃_i

U and V are supermartingales whenever X is an almost-supermartingale
with the trace's A, B, C tracks. Absent tracks are read as zero.
"""
import numpy as np


def _track_or_zero(trace, name):
    values = getattr(trace, name)
    return values if values is not None else np.zeros(len(trace.x))


def _shifted_sums(values):
    """Σ_{i<n} values_i for n = 0..len-1"""
    return np.concatenate([[0.0], np.cumsum(values)[:-1]])


def transformed_processes(trace):
    """{"P", "X_tilde", "U", "V"} as arrays aligned with the trace"""
    a = _track_or_zero(trace, "a")
    b = _track_or_zero(trace, "b")
    c = _track_or_zero(trace, "c")
    P = np.concatenate([[1.0], np.cumprod(1.0 + a)[:-1]])
    P_next = np.cumprod(1.0 + a)
    x_tilde = trace.x / P
    U = x_tilde - _shifted_sums(c / P_next)
    V = U + _shifted_sums(b / P_next)
    return {"P": P, "X_tilde": x_tilde, "U": U, "V": V}


def stopping_time(trace, x):
    """T_x = inf{n : Σ_{i≤n} C̃_i > x}, or None when not reached in the trace"""
    a = _track_or_zero(trace, "a")
    c = _track_or_zero(trace, "c")
    hits = np.flatnonzero(np.cumsum(c / np.cumprod(1.0 + a)) > x)
    return int(hits[0]) if hits.size else None
