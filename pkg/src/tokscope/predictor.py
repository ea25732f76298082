"""Pairwise tokenizer-quality prediction from intrinsic metrics.

Each training example compares two tokenizers on one language: features
are the difference of their metric vectors, the label says whether the
first-listed tokenizer has the lower (better) mean MetricX over the two
translation directions. Three model families are supported, all fit by
deterministic full-batch optimizers so repeated runs are bit-identical:

  logistic     L2-regularized logistic regression, gradient descent
  linear-svm   hinge loss + L2, projected subgradient descent
  rbf-svm      kernel SVM fit by SMO, probabilities via Platt scaling

Features are standardized on the training split; the standardization is
stored in the model and applied inside predict_pair. Hyperparameters
come from small fixed grids chosen by stratified k-fold CV on mean F1,
with ties resolved toward stronger regularization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .corpus_io import DownstreamFixture
from .stats import f1_score
from .zipf_metrics import METRIC_NAMES

MODEL_KINDS = ("logistic", "linear-svm", "rbf-svm")

REGULARIZATION_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
GAMMA_GRID = (0.01, 0.1, 1.0, 10.0)

GD_MAX_ITER = 10_000
GD_TOL = 1e-8
SUBGRAD_ITERS = 10_000
SMO_TOL = 1e-10
SMO_MAX_STEPS = 200_000


@dataclass(frozen=True)
class PairwiseExample:
    tok_i: str
    tok_j: str
    language: str
    features: np.ndarray
    label: int

    def __post_init__(self):
        if self.tok_i == self.tok_j:
            raise ValueError("a pair must compare two distinct tokenizers")
        feats = np.asarray(self.features, dtype=np.float64)
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")
        object.__setattr__(self, "features", feats)


@dataclass
class PairwiseModel:
    kind: str
    feature_names: tuple[str, ...]
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    beta0: float = 0.0
    weights: np.ndarray | None = None
    support_set: np.ndarray | None = None
    dual_coefficients: np.ndarray | None = None
    gamma: float | None = None
    platt: tuple[float, float] | None = None
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.weights is not None and len(self.weights) != len(self.feature_names):
            raise ValueError("weights length must match feature count")


@dataclass(frozen=True)
class EvaluationReport:
    per_heldout: dict[str, float]
    mean_f1: float
    feature_set: tuple[str, ...]
    model_kind: str
    seed: int


@dataclass(frozen=True)
class PairwiseProbabilities:
    """Symmetrized win probabilities: matrix[i, j] = P(names[i] beats names[j])."""

    names: tuple[str, ...]
    matrix: np.ndarray


def _sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _standardization(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return mean, scale


def _design(examples) -> tuple[np.ndarray, np.ndarray]:
    if not examples:
        raise ValueError("no training examples")
    X = np.vstack([e.features for e in examples])
    y = np.array([e.label for e in examples], dtype=np.float64)
    return X, y


def _check_two_classes(y: np.ndarray, minimum: int = 2) -> None:
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos < minimum or n_neg < minimum:
        raise ValueError(
            f"need at least {minimum} examples per class, "
            f"got {n_pos} positive / {n_neg} negative"
        )


def _default_names(X: np.ndarray) -> tuple[str, ...]:
    return tuple(f"f{i}" for i in range(X.shape[1]))


def _stratified_folds(y: np.ndarray, k: int) -> list[np.ndarray]:
    """Deal each class round-robin over k folds, in dataset order."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (1.0, 0.0):
        for slot, idx in enumerate(np.nonzero(y == cls)[0]):
            folds[slot % k].append(int(idx))
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


def _safe_f1(predicted: np.ndarray, actual: np.ndarray) -> float:
    # CV-internal scorer: an all-negative fold predicted all-negative
    # counts as perfect instead of raising.
    tp = float(np.sum((predicted == 1) & (actual == 1)))
    fp = float(np.sum((predicted == 1) & (actual == 0)))
    fn = float(np.sum((predicted == 0) & (actual == 1)))
    if tp == 0.0:
        return 1.0 if (fp == 0.0 and fn == 0.0) else 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2.0 * precision * recall / (precision + recall)


def _cv_mean_f1(X, y, folds, fit_fn, label_fn) -> float:
    scores = []
    for held in folds:
        if len(held) == 0:
            continue
        train = np.setdiff1d(np.arange(len(y)), held)
        params = fit_fn(X[train], y[train])
        scores.append(_safe_f1(label_fn(params, X[held]), y[held]))
    return float(np.mean(scores))


def _out_of_fold_decisions(X, y, folds, fit_fn, decision_fn):
    decisions = np.zeros(len(y))
    for held in folds:
        if len(held) == 0:
            continue
        train = np.setdiff1d(np.arange(len(y)), held)
        params = fit_fn(X[train], y[train])
        decisions[held] = decision_fn(params, X[held])
    return decisions


# --- logistic regression -------------------------------------------------


def _fit_logistic_core(X, y, lam):
    """Gradient descent with the 1/L step for the L2-penalized log loss.

    The intercept is not penalized. Raises if the gradient norm has not
    reached tolerance within the iteration cap, which happens e.g. for
    separable data with lam = 0 (the weights diverge).
    """
    mean, scale = _standardization(X)
    Z = (X - mean) / scale
    n, d = Z.shape
    A = np.column_stack([np.ones(n), Z])
    lipschitz = lam + float(np.linalg.eigvalsh(A.T @ A / (4.0 * n)).max())
    step = 1.0 / lipschitz
    theta = np.zeros(d + 1)
    for _ in range(GD_MAX_ITER):
        p = _sigmoid(A @ theta)
        grad = A.T @ (p - y) / n
        grad[1:] += lam * theta[1:]
        if np.linalg.norm(grad) <= GD_TOL:
            break
        theta = theta - step * grad
    else:
        raise RuntimeError(
            f"logistic fit did not converge in {GD_MAX_ITER} iterations "
            f"(lam={lam}); the data may be degenerate"
        )
    return mean, scale, float(theta[0]), theta[1:]


def _logistic_labels(params, X):
    mean, scale, b, w = params
    return (_sigmoid(b + ((X - mean) / scale) @ w) > 0.5).astype(np.float64)


def fit_logistic(
    examples,
    cv_folds: int = 5,
    lam: float | None = None,
    feature_names: tuple[str, ...] | None = None,
) -> PairwiseModel:
    """L2 logistic regression; lam picked from the grid by CV unless given."""
    X, y = _design(examples)
    _check_two_classes(y)
    if lam is None:
        folds = _stratified_folds(y, cv_folds)
        best_score = -np.inf
        lam = max(REGULARIZATION_GRID)
        # Strongest regularization first, strict improvement to switch,
        # so ties keep the stronger choice.
        for candidate in sorted(REGULARIZATION_GRID, reverse=True):
            score = _cv_mean_f1(
                X, y, folds,
                lambda Xt, yt, c=candidate: _fit_logistic_core(Xt, yt, c),
                _logistic_labels,
            )
            if score > best_score:
                best_score, lam = score, candidate
    mean, scale, b, w = _fit_logistic_core(X, y, lam)
    return PairwiseModel(
        kind="logistic",
        feature_names=feature_names or _default_names(X),
        feature_mean=mean,
        feature_scale=scale,
        beta0=b,
        weights=w,
        hyperparameters={"lam": lam, "cv_folds": cv_folds},
    )


# --- linear SVM ----------------------------------------------------------


def _fit_linear_svm_core(X, y, C):
    """Projected subgradient descent on (1/(2C))||theta||^2 + mean hinge.

    The bias rides along as an augmented constant feature, so it shares
    the L2 penalty; with standardized features the distortion is small.
    Normalizing by the example count keeps the decision function
    invariant under dataset duplication.
    """
    mean, scale = _standardization(X)
    Z = (X - mean) / scale
    n, d = Z.shape
    A = np.column_stack([Z, np.ones(n)])
    sign = np.where(y > 0.5, 1.0, -1.0)
    lam = 1.0 / C
    theta = np.zeros(d + 1)
    radius = 1.0 / np.sqrt(lam)
    for t in range(1, SUBGRAD_ITERS + 1):
        margins = sign * (A @ theta)
        violating = margins < 1.0
        grad = lam * theta - (sign[violating, None] * A[violating]).sum(axis=0) / n
        theta = theta - grad / (lam * t)
        norm = np.linalg.norm(theta)
        if norm > radius:
            theta = theta * (radius / norm)
    return mean, scale, float(theta[d]), theta[:d]


def _linear_decisions(params, X):
    mean, scale, b, w = params
    return b + ((X - mean) / scale) @ w


def _linear_labels(params, X):
    return (_linear_decisions(params, X) > 0.0).astype(np.float64)


def fit_linear_svm(
    examples,
    cv_folds: int = 5,
    C: float | None = None,
    feature_names: tuple[str, ...] | None = None,
) -> PairwiseModel:
    """Linear SVM with Platt-scaled probabilities; C chosen by CV."""
    X, y = _design(examples)
    _check_two_classes(y)
    folds = _stratified_folds(y, cv_folds)
    if C is None:
        best_score = -np.inf
        C = min(REGULARIZATION_GRID)
        # Smallest C = strongest regularization; ties keep it.
        for candidate in sorted(REGULARIZATION_GRID):
            score = _cv_mean_f1(
                X, y, folds,
                lambda Xt, yt, c=candidate: _fit_linear_svm_core(Xt, yt, c),
                _linear_labels,
            )
            if score > best_score:
                best_score, C = score, candidate
    mean, scale, b, w = _fit_linear_svm_core(X, y, C)
    decisions = _out_of_fold_decisions(
        X, y, folds,
        lambda Xt, yt: _fit_linear_svm_core(Xt, yt, C),
        _linear_decisions,
    )
    platt = fit_platt(decisions, y)
    return PairwiseModel(
        kind="linear-svm",
        feature_names=feature_names or _default_names(X),
        feature_mean=mean,
        feature_scale=scale,
        beta0=b,
        weights=w,
        platt=platt,
        hyperparameters={"C": C, "cv_folds": cv_folds},
    )


# --- RBF SVM via SMO -----------------------------------------------------


def _rbf_kernel(A, B, gamma):
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def _smo(K, sign, C):
    """Solve the C-SVM dual by sequential minimal optimization.

    Working pairs are the maximal KKT violators (first index wins ties);
    the loop stops when the violation gap falls below tolerance.
    Returns the dual coefficients and intercept.
    """
    n = len(sign)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective wrt alpha
    Q = (sign[:, None] * sign[None, :]) * K
    bound = C - 1e-12
    for _ in range(SMO_MAX_STEPS):
        yg = -sign * grad
        up = ((sign > 0) & (alpha < bound)) | ((sign < 0) & (alpha > 1e-12))
        low = ((sign < 0) & (alpha < bound)) | ((sign > 0) & (alpha > 1e-12))
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        if yg[i] - yg[j] <= SMO_TOL:
            break
        if sign[i] != sign[j]:
            L = max(0.0, alpha[j] - alpha[i])
            H = min(C, C + alpha[j] - alpha[i])
        else:
            L = max(0.0, alpha[i] + alpha[j] - C)
            H = min(C, alpha[i] + alpha[j])
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 0.0:
            eta = 1e-12
        u = sign * (grad + 1.0)  # decision values without the intercept
        err_i = u[i] - sign[i]
        err_j = u[j] - sign[j]
        new_aj = np.clip(alpha[j] + sign[j] * (err_i - err_j) / eta, L, H)
        delta_j = new_aj - alpha[j]
        if abs(delta_j) < 1e-14:
            warnings.warn("SMO stalled on a degenerate pair", RuntimeWarning)
            break
        delta_i = -sign[i] * sign[j] * delta_j
        alpha[i] += delta_i
        alpha[j] += delta_j
        grad += Q[:, i] * delta_i + Q[:, j] * delta_j
    else:
        warnings.warn("SMO hit its step cap before reaching tolerance", RuntimeWarning)

    u = sign * (grad + 1.0)
    free = (alpha > 1e-8) & (alpha < C - 1e-8)
    if free.any():
        b = float(np.mean(sign[free] - u[free]))
    else:
        yg = -sign * grad
        up = ((sign > 0) & (alpha < bound)) | ((sign < 0) & (alpha > 1e-12))
        low = ((sign < 0) & (alpha < bound)) | ((sign > 0) & (alpha > 1e-12))
        hi = yg[up].max() if up.any() else 0.0
        lo = yg[low].min() if low.any() else 0.0
        b = float((hi + lo) / 2.0)
    return alpha, b


def _fit_rbf_core(X, y, C, gamma):
    mean, scale = _standardization(X)
    Z = (X - mean) / scale
    sign = np.where(y > 0.5, 1.0, -1.0)
    K = _rbf_kernel(Z, Z, gamma)
    alpha, b = _smo(K, sign, C)
    keep = alpha > 1e-12
    return mean, scale, Z[keep], (alpha * sign)[keep], b


def _rbf_decisions(params, X):
    mean, scale, support, coef, b = params[:5]
    gamma = params[5]
    Z = (X - mean) / scale
    if len(support) == 0:
        return np.full(len(Z), b)
    return _rbf_kernel(Z, support, gamma) @ coef + b


def fit_rbf_svm_platt(
    examples,
    cv_folds: int = 5,
    C: float | None = None,
    gamma: float | None = None,
    feature_names: tuple[str, ...] | None = None,
) -> PairwiseModel:
    """RBF-kernel SVM with Platt-scaled probabilities; (C, gamma) by CV."""
    X, y = _design(examples)
    if len(y) < 4:
        raise ValueError("need at least 4 examples to fit an RBF SVM")
    _check_two_classes(y)
    folds = _stratified_folds(y, cv_folds)
    if C is None or gamma is None:
        best_score = -np.inf
        best = (min(REGULARIZATION_GRID), min(GAMMA_GRID))
        # Ascending grids with strict improvement: ties keep the
        # smallest C, then the smallest gamma.
        for C_cand in sorted(REGULARIZATION_GRID):
            for g_cand in sorted(GAMMA_GRID):
                score = _cv_mean_f1(
                    X, y, folds,
                    lambda Xt, yt, c=C_cand, g=g_cand: (
                        *_fit_rbf_core(Xt, yt, c, g), g
                    ),
                    lambda params, Xe: (_rbf_decisions(params, Xe) > 0.0).astype(
                        np.float64
                    ),
                )
                if score > best_score:
                    best_score, best = score, (C_cand, g_cand)
        C, gamma = best
    mean, scale, support, coef, b = _fit_rbf_core(X, y, C, gamma)
    decisions = _out_of_fold_decisions(
        X, y, folds,
        lambda Xt, yt: (*_fit_rbf_core(Xt, yt, C, gamma), gamma),
        _rbf_decisions,
    )
    platt = fit_platt(decisions, y)
    return PairwiseModel(
        kind="rbf-svm",
        feature_names=feature_names or _default_names(X),
        feature_mean=mean,
        feature_scale=scale,
        beta0=b,
        support_set=support,
        dual_coefficients=coef,
        gamma=gamma,
        platt=platt,
        hyperparameters={"C": C, "gamma": gamma, "cv_folds": cv_folds},
    )


# --- Platt scaling -------------------------------------------------------


def fit_platt(decisions, labels, max_iter: int = 100) -> tuple[float, float]:
    """Fit (A, B) so that sigma(A*d + B) calibrates decision values d.

    Newton's method with backtracking on the regularized cross-entropy,
    using smoothed targets (N+ + 1)/(N+ + 2) and 1/(N- + 2).
    """
    d = np.asarray(decisions, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.float64) > 0.5
    prior1 = float(lab.sum())
    prior0 = float(len(lab) - prior1)
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(lab, hi, lo)
    sigma = 1e-12
    min_step = 1e-10

    def objective(a, b):
        f = a * d + b
        # log(1 + exp(-|f|)) + max(f, 0) is the stable softplus of f.
        return float(np.sum(t * f + np.log1p(np.exp(-np.abs(f))) + np.maximum(-f, 0.0)))

    A = 0.0
    B = float(np.log((prior0 + 1.0) / (prior1 + 1.0)))
    fval = objective(A, B)
    for _ in range(max_iter):
        f = A * d + B
        p = _sigmoid(-f)  # probability of the positive class in this parameterization
        q = 1.0 - p
        d2 = p * q
        h11 = float(np.sum(d * d * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(d * d2))
        g1 = float(np.sum(d * (t - p)))
        g2 = float(np.sum(t - p))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            new_a, new_b = A + step * dA, B + step * dB
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                A, B, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            warnings.warn("Platt line search failed to make progress", RuntimeWarning)
            break
    # The loop minimizes with p = sigma(-(A*d + B)); flip signs so the
    # returned parameters satisfy p = sigma(A*d + B).
    return (-A, -B)


# --- prediction ----------------------------------------------------------


def decision_value(model: PairwiseModel, feature_diff) -> float:
    x = np.asarray(feature_diff, dtype=np.float64)
    if x.shape != (len(model.feature_names),):
        raise ValueError(
            f"expected {len(model.feature_names)} features, got shape {x.shape}"
        )
    z = (x - model.feature_mean) / model.feature_scale
    if model.kind in ("logistic", "linear-svm"):
        return float(model.beta0 + z @ model.weights)
    if model.support_set is None or model.gamma is None:
        raise ValueError("rbf model is missing its support set or gamma")
    k = _rbf_kernel(z[None, :], model.support_set, model.gamma)[0]
    return float(k @ model.dual_coefficients + model.beta0)


def predict_pair(model: PairwiseModel, feature_diff) -> float:
    """Probability that the first tokenizer of the pair is the better one."""
    d = decision_value(model, feature_diff)
    if model.kind == "logistic":
        return float(_sigmoid(d))
    if model.platt is None:
        raise ValueError(f"{model.kind} model has no Platt calibration")
    a, b = model.platt
    return float(_sigmoid(a * d + b))


# --- dataset and evaluation protocols ------------------------------------


def build_pairwise_dataset(
    metrics: dict,
    fixture: DownstreamFixture,
    scale: str,
    feature_set=METRIC_NAMES,
    seed: int = 0,
) -> list[PairwiseExample]:
    """One example per language and unordered tokenizer pair.

    The orientation of each pair is drawn from a seeded RNG so the
    dataset is balanced in expectation but contains no duplicate
    anti-correlated rows. Labels compare two-direction mean MetricX;
    exact ties are refused.
    """
    feature_set = tuple(feature_set)
    tokenizers = fixture.tokenizers()
    languages = fixture.languages()
    rng = np.random.default_rng(seed)
    examples = []
    for language in languages:
        for a_idx in range(len(tokenizers)):
            for b_idx in range(a_idx + 1, len(tokenizers)):
                first, second = tokenizers[a_idx], tokenizers[b_idx]
                if rng.random() < 0.5:
                    first, second = second, first
                try:
                    mv_first = metrics[(first, language)]
                    mv_second = metrics[(second, language)]
                except KeyError as e:
                    raise ValueError(f"missing metrics for {e.args[0]}") from None
                feats = mv_first.as_features(feature_set) - mv_second.as_features(
                    feature_set
                )
                mean_first = fixture.mean_metricx(first, scale, language)
                mean_second = fixture.mean_metricx(second, scale, language)
                if mean_first == mean_second:
                    raise ValueError(
                        f"downstream tie between {first!r} and {second!r} "
                        f"on {language!r}; labels are undefined"
                    )
                examples.append(
                    PairwiseExample(
                        tok_i=first,
                        tok_j=second,
                        language=language,
                        features=feats,
                        label=int(mean_first < mean_second),
                    )
                )
    return examples


_FITTERS = {
    "logistic": fit_logistic,
    "linear-svm": fit_linear_svm,
    "rbf-svm": fit_rbf_svm_platt,
}


def leave_one_tokenizer_out(
    metrics: dict,
    fixture: DownstreamFixture,
    scale: str,
    feature_set=METRIC_NAMES,
    model_kind: str = "logistic",
    cv_folds: int = 5,
    seed: int = 0,
) -> EvaluationReport:
    """Hold out each tokenizer in turn; F1 on the examples that involve it."""
    if model_kind not in _FITTERS:
        raise ValueError(f"unknown model kind {model_kind!r}")
    feature_set = tuple(feature_set)
    tokenizers = fixture.tokenizers()
    if len(tokenizers) < 3:
        raise ValueError("need at least 3 tokenizers for leave-one-out")
    dataset = build_pairwise_dataset(metrics, fixture, scale, feature_set, seed)
    fitter = _FITTERS[model_kind]
    per_heldout = {}
    for held in tokenizers:
        train = [e for e in dataset if held not in (e.tok_i, e.tok_j)]
        test = [e for e in dataset if held in (e.tok_i, e.tok_j)]
        model = fitter(train, cv_folds=cv_folds, feature_names=feature_set)
        predicted = [int(predict_pair(model, e.features) > 0.5) for e in test]
        actual = [e.label for e in test]
        per_heldout[held] = f1_score(predicted, actual)
    return EvaluationReport(
        per_heldout=per_heldout,
        mean_f1=float(np.mean(list(per_heldout.values()))),
        feature_set=feature_set,
        model_kind=model_kind,
        seed=seed,
    )


def leave_one_language_out(
    metrics: dict,
    fixture: DownstreamFixture,
    scale: str,
    cv_folds: int = 5,
    seed: int = 0,
) -> dict[str, PairwiseProbabilities]:
    """Per language: win probabilities from an RBF SVM trained on the others.

    Raw model outputs for the two orientations of a pair need not agree,
    so they are symmetrized: P[i, j] <- (P(i over j) + 1 - P(j over i))/2.
    """
    languages = fixture.languages()
    if len(languages) < 2:
        raise ValueError("need at least 2 languages for leave-one-out")
    tokenizers = fixture.tokenizers()
    dataset = build_pairwise_dataset(metrics, fixture, scale, METRIC_NAMES, seed)
    out = {}
    for language in languages:
        train = [e for e in dataset if e.language != language]
        model = fit_rbf_svm_platt(train, cv_folds=cv_folds, feature_names=METRIC_NAMES)
        n = len(tokenizers)
        matrix = np.full((n, n), 0.5)
        for i in range(n):
            for j in range(i + 1, n):
                xi = metrics[(tokenizers[i], language)].as_features(METRIC_NAMES)
                xj = metrics[(tokenizers[j], language)].as_features(METRIC_NAMES)
                p_ij = predict_pair(model, xi - xj)
                p_ji = predict_pair(model, xj - xi)
                p = (p_ij + 1.0 - p_ji) / 2.0
                matrix[i, j] = p
                matrix[j, i] = 1.0 - p
        out[language] = PairwiseProbabilities(names=tuple(tokenizers), matrix=matrix)
    return out
