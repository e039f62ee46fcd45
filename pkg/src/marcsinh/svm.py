"""C-SVC with pluggable kernel, trained by an SMO dual solver.

Multiclass problems are reduced one-vs-one: one binary machine per class
pair, combined by voting.  Class imbalance is handled by scaling the box
constraint per class ("balanced" weighting).
"""

from dataclasses import dataclass, field

import numpy as np

from .functions import Kernel, gram_matrix


class ConvergenceError(RuntimeError):
    """Raised when the SMO solver hits its iteration cap before the KKT
    conditions are satisfied."""

    def __init__(self, message, iterations):
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True)
class SvmConfig:
    """Hyperparameters of the benchmark SVC.

    seed is stored for interface fidelity with the reference classifier but
    the solver itself is deterministic and never draws random numbers.
    """

    kernel: Kernel
    C: float = 1.0
    class_weight: str = "balanced"  # "balanced" or "uniform"
    tol: float = 1e-3
    max_iter: int = 100_000
    seed: int = 13

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.class_weight not in ("balanced", "uniform"):
            raise ValueError("class_weight must be 'balanced' or 'uniform'")


def balanced_class_weights(class_counts, C=1.0):
    """Per-class box constraint C_k = C * N / (k * n_k).

    Inversely proportional to class frequency, so C_k * n_k is the same for
    every class.
    """
    counts = np.asarray(class_counts, dtype=float)
    if (counts <= 0).any():
        raise ValueError("empty class: every class count must be > 0")
    return C * counts.sum() / (counts.size * counts)


def smo_solve(K, y, C, tol=1e-3, max_iter=100_000):
    """Maximise the C-SVC dual for one binary problem.

        max  sum(a) - 1/2 a^T (yy^T * K) a
        s.t. 0 <= a_i <= C_i,  sum(a_i y_i) = 0

    K is the (n, n) kernel matrix, y is in {-1, +1}, and C gives the
    per-sample upper bound.  Pairs of variables are updated SMO-style; the
    working pair is the maximal violating pair of the KKT conditions, and
    iteration stops once the violation gap drops to `tol`.

    Returns (alpha, b, iterations) where the decision function is
    sum_i alpha_i y_i K(x_i, x) + b.  Raises ConvergenceError when the cap
    is reached while the gap is still above `tol`.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    C = np.asarray(C, dtype=float)
    n = y.size
    if K.shape != (n, n):
        raise ValueError(f"kernel matrix shape {K.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if (C <= 0).any():
        raise ValueError("per-sample C must be > 0")

    Q = K * np.outer(y, y)
    qdiag = np.diag(Q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a^T Q a - sum(a)
    tau = 1e-12

    iterations = 0
    while True:
        minus_yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        i = int(np.where(up, minus_yg, -np.inf).argmax())
        j = int(np.where(low, minus_yg, np.inf).argmin())
        gap = minus_yg[i] - minus_yg[j]
        if gap <= tol:
            break
        if iterations >= max_iter:
            raise ConvergenceError(
                f"did not converge within {max_iter} iterations "
                f"(KKT violation {gap:.3e} > tol {tol:g})",
                iterations,
            )
        iterations += 1

        # two-variable subproblem, clipped to the box [0, C_i] x [0, C_j]
        old_i, old_j = alpha[i], alpha[j]
        ci, cj = C[i], C[j]
        if y[i] != y[j]:
            quad = qdiag[i] + qdiag[j] + 2.0 * Q[i, j]
            if quad <= 0:
                quad = tau
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > ci - cj:
                if alpha[i] > ci:
                    alpha[i] = ci
                    alpha[j] = ci - diff
            else:
                if alpha[j] > cj:
                    alpha[j] = cj
                    alpha[i] = cj + diff
        else:
            quad = qdiag[i] + qdiag[j] - 2.0 * Q[i, j]
            if quad <= 0:
                quad = tau
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > ci:
                if alpha[i] > ci:
                    alpha[i] = ci
                    alpha[j] = total - ci
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > cj:
                if alpha[j] > cj:
                    alpha[j] = cj
                    alpha[i] = total - cj
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        grad += Q[:, i] * (alpha[i] - old_i) + Q[:, j] * (alpha[j] - old_j)

    b = _intercept(alpha, y, grad, C)
    return alpha, b, iterations


def _intercept(alpha, y, grad, C):
    # For a free vector (0 < a < C), KKT forces b = -y_i * grad_i exactly;
    # average those.  With no free vector b is only bracketed by the
    # bound-side inequalities, so take the midpoint of that interval.
    r = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(r[free].mean())
    lower = ((y > 0) & (alpha <= 0)) | ((y < 0) & (alpha >= C))
    upper = ((y > 0) & (alpha >= C)) | ((y < 0) & (alpha <= 0))
    lo = r[lower].max() if lower.any() else -np.inf
    hi = r[upper].min() if upper.any() else np.inf
    return float((lo + hi) / 2.0)


@dataclass(frozen=True)
class PairModel:
    """One binary machine of the one-vs-one reduction.

    Samples of pos_class were labelled +1 during training, so a positive
    decision value votes for pos_class.
    """

    pos_class: int
    neg_class: int
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i over the support vectors
    intercept: float
    iterations: int = 0


def _tally_votes(pair_classes, decisions, n_classes):
    """Combine one-vs-one decision values into predicted class indices.

    decisions is (n_samples, n_pairs); pair_classes lists (pos, neg) per
    column.  Each pair votes for its positive class when the decision value
    is strictly positive.  Ties on vote count are broken by the summed
    |decision| of the pairs each class won, then by lowest class index.
    """
    n = decisions.shape[0]
    votes = np.zeros((n, n_classes))
    strength = np.zeros((n, n_classes))
    for p, (pos, neg) in enumerate(pair_classes):
        d = decisions[:, p]
        winner = np.where(d > 0, pos, neg)
        mag = np.abs(d)
        for c in (pos, neg):
            won = winner == c
            votes[won, c] += 1.0
            strength[won, c] += mag[won]
    best = votes.max(axis=1, keepdims=True)
    # mask out non-leading classes, then rank by strength; argmax takes the
    # lowest index on remaining ties
    masked = np.where(votes == best, strength, -1.0)
    return masked.argmax(axis=1)


class SvmClassifier:
    """One-vs-one soft-margin SVC trained by :func:`smo_solve`.

    fit() is deterministic: identical data and config give bit-identical
    models and predictions.
    """

    def __init__(self, config):
        self.config = config
        self.classes_ = None
        self.pair_models_ = None
        self.n_features_ = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError("X must be (n_samples, n_features) matching y")
        classes, y_idx = np.unique(y, return_inverse=True)
        if classes.size < 2:
            raise ValueError("single class: training data must contain >= 2 classes")

        counts = np.bincount(y_idx, minlength=classes.size)
        if self.config.class_weight == "balanced":
            class_c = balanced_class_weights(counts, self.config.C)
        else:
            class_c = np.full(classes.size, float(self.config.C))

        pair_models = []
        for a in range(classes.size):
            for b in range(a + 1, classes.size):
                mask = (y_idx == a) | (y_idx == b)
                Xp = X[mask]
                yp = np.where(y_idx[mask] == a, 1.0, -1.0)
                Cp = np.where(yp > 0, class_c[a], class_c[b])
                K = gram_matrix(self.config.kernel, Xp, Xp)
                alpha, intercept, iters = smo_solve(
                    K, yp, Cp, tol=self.config.tol, max_iter=self.config.max_iter
                )
                sv = alpha > 0
                pair_models.append(
                    PairModel(
                        pos_class=a,
                        neg_class=b,
                        support_vectors=Xp[sv].copy(),
                        dual_coef=(alpha * yp)[sv].copy(),
                        intercept=intercept,
                        iterations=iters,
                    )
                )

        self.classes_ = classes
        self.pair_models_ = tuple(pair_models)
        self.n_features_ = X.shape[1]
        return self

    def _check_ready(self, X):
        if self.pair_models_ is None:
            raise RuntimeError("classifier is not fitted")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise ValueError(
                f"expected (n, {self.n_features_}) inputs, got {X.shape}"
            )
        return X

    def decision_function(self, X):
        """Decision values of every pair machine, shape (n_samples, n_pairs)."""
        X = self._check_ready(X)
        cols = [
            gram_matrix(self.config.kernel, X, pm.support_vectors) @ pm.dual_coef
            + pm.intercept
            for pm in self.pair_models_
        ]
        return np.column_stack(cols)

    def predict(self, X):
        d = self.decision_function(X)
        pairs = [(pm.pos_class, pm.neg_class) for pm in self.pair_models_]
        idx = _tally_votes(pairs, d, self.classes_.size)
        return self.classes_[idx]
