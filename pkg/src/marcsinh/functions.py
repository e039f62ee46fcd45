"""m-arcsinh and the gold-standard activations/kernels it is benchmarked against.

The m-arcsinh function

    f(x) = arcsinh(x) * (1/12) * sqrt(|x|)

is used both as an elementwise MLP activation and, applied as an explicit
feature map, as an SVM kernel: K(x, y) = f(x) . f(y).
"""

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("identity", "logistic", "tanh", "relu", "m_arcsinh")
KERNELS = ("linear", "poly", "rbf", "sigmoid", "m_arcsinh")
DERIVATIVE_MODES = ("paper", "exact")


def m_arcsinh(x):
    """Evaluate arcsinh(x) * sqrt(|x|) / 12 elementwise.

    Odd, strictly increasing, and total on finite reals.  Written as
    (1/3 * arcsinh) * (1/4 * sqrt) it is also the feature map of the
    m-arcsinh kernel.
    """
    z = np.asarray(x, dtype=float)
    return (1.0 / 3.0 * np.arcsinh(z)) * (1.0 / 4.0 * np.sqrt(np.abs(z)))


def m_arcsinh_derivative(x):
    """Derivative of :func:`m_arcsinh`.

    For x != 0:

        sqrt(|x|) / (12 sqrt(x^2 + 1)) + x arcsinh(x) / (24 |x|^(3/2))

    The second term is 0/0 at x = 0; both terms vanish in the limit, so the
    value at 0 is defined as 0 rather than letting the division produce NaN.
    """
    z = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(z)
    nz = z != 0.0
    v = z[nz]
    out[nz] = np.sqrt(np.abs(v)) / (12.0 * np.sqrt(v * v + 1.0)) + (
        v * np.arcsinh(v)
    ) / (24.0 * np.abs(v) ** 1.5)
    if np.ndim(x) == 0:
        return out[0]
    return out.reshape(np.shape(x))


def _logistic(z):
    # clip keeps exp() from overflowing for very negative inputs
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


_FORWARD = {
    "identity": lambda z: z.copy(),
    "logistic": _logistic,
    "tanh": np.tanh,
    "relu": lambda z: np.maximum(z, 0.0),
    "m_arcsinh": m_arcsinh,
}

# Derivative factors expressed in terms of the array handed over by the
# caller.  For identity/logistic/tanh/relu that array is the forward output
# and the factor is exact.  For m_arcsinh the same closed form is applied to
# whatever the caller passes: the forward output ("paper" mode, replicating
# the published in-place derivative) or the cached pre-activations ("exact"
# mode, the true chain rule).
_DERIVATIVE = {
    "identity": lambda z: np.ones_like(z),
    "logistic": lambda z: z * (1.0 - z),
    "tanh": lambda z: 1.0 - z * z,
    "relu": lambda z: (z > 0.0).astype(float),
    "m_arcsinh": m_arcsinh_derivative,
}


def _check_activation(kind):
    if kind not in _FORWARD:
        raise ValueError(f"unknown activation {kind!r}; expected one of {ACTIVATIONS}")


def apply_activation(kind, Z):
    """Apply the forward map of activation `kind` elementwise to Z."""
    _check_activation(kind)
    return _FORWARD[kind](np.asarray(Z, dtype=float))


def apply_activation_derivative(kind, Z, delta):
    """Multiply the error signal `delta` by the derivative factor of `kind`.

    Z must be the forward-pass output of the activation (for m_arcsinh in
    exact mode the caller passes pre-activations instead, see module note
    above).  Returns a new array; delta is not modified.
    """
    _check_activation(kind)
    Z = np.asarray(Z, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if Z.shape != delta.shape:
        raise ValueError(f"shape mismatch: Z {Z.shape} vs delta {delta.shape}")
    return delta * _DERIVATIVE[kind](Z)


@dataclass(frozen=True)
class Kernel:
    """Kernel choice plus its coefficients.

    gamma is the coefficient of the poly/rbf/sigmoid kernels and is ignored
    by linear and m_arcsinh (the published m-arcsinh kernel takes gamma but
    never uses it).  degree and coef0 follow the usual poly/sigmoid defaults.
    """

    name: str
    gamma: float = 0.001
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.name not in KERNELS:
            raise ValueError(f"unknown kernel {self.name!r}; expected one of {KERNELS}")
        if self.name in ("poly", "rbf", "sigmoid") and not self.gamma > 0:
            raise ValueError(f"gamma must be > 0 for the {self.name} kernel")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")


def gram_matrix(kernel, X, Y):
    """Pairwise kernel evaluations: entry (i, j) = K(X[i], Y[j]).

    X is (n, d) and Y is (m, d); the result is (n, m).
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or Y.ndim != 2:
        raise ValueError("gram_matrix expects 2-D sample matrices")
    if X.shape[1] != Y.shape[1]:
        raise ValueError(
            f"feature-count mismatch: X has {X.shape[1]} columns, Y has {Y.shape[1]}"
        )
    if kernel.name == "linear":
        return X @ Y.T
    if kernel.name == "poly":
        return (kernel.gamma * (X @ Y.T) + kernel.coef0) ** kernel.degree
    if kernel.name == "rbf":
        sq = (
            np.sum(X * X, axis=1)[:, None]
            + np.sum(Y * Y, axis=1)[None, :]
            - 2.0 * (X @ Y.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-kernel.gamma * sq)
    if kernel.name == "sigmoid":
        return np.tanh(kernel.gamma * (X @ Y.T) + kernel.coef0)
    # m_arcsinh: explicit feature map, so the Gram matrix is PSD by construction
    return m_arcsinh(X) @ m_arcsinh(Y).T
