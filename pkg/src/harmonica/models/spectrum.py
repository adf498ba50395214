"""Three-tier model repository: regressors of increasing capacity and cost.

Tiers: ``lin`` (ordinary least squares on the 5 lags), ``ridge2`` (ridge
over lags plus all pairwise lag products) and ``mlp`` (one-hidden-layer
tanh regressor trained by full-batch gradient descent). Cost units are MAC
counts, so the energy proxy is platform-independent.
"""

import math
import struct
import time
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, InsufficientDataError, UnknownModelError
from . import kernels

N_LAGS = 5

MLP_HIDDEN = 32
MLP_EPOCHS = 200
MLP_LR = 0.05
RIDGE_LAMBDA = 1.0

SIG_EPS = 1e-6


@dataclass(frozen=True)
class ModelDescriptor:
    model_id: str
    tier: int
    inference_cost_units: int
    training_cost_units_per_sample: int
    training_epochs: int


# Inference units are MACs per prediction: lin = 5 multiplies + intercept;
# ridge2 = 20 features + intercept; mlp(H=32) = 5*32 + 32 + 33.
# Training units per sample per epoch: the forward count for the closed-form
# models (one pass), forward + 3x forward for the mlp backward pass.
_SPECTRUM = (
    ModelDescriptor("lin", 0, 6, 6, 1),
    ModelDescriptor("ridge2", 1, 21, 21, 1),
    ModelDescriptor("mlp", 2, 225, 900, MLP_EPOCHS),
)
_BY_ID = {d.model_id: d for d in _SPECTRUM}

TIER_ORDER = tuple(d.model_id for d in _SPECTRUM)


def spectrum() -> tuple[ModelDescriptor, ...]:
    """All model descriptors in tier order."""
    return _SPECTRUM


def descriptor(model_id: str) -> ModelDescriptor:
    try:
        return _BY_ID[model_id]
    except KeyError:
        raise UnknownModelError(f"unknown model_id {model_id!r}") from None


@dataclass(frozen=True)
class WindowSample:
    """Five lag values and the value they predict."""

    lags: tuple[float, float, float, float, float]
    target: float


@dataclass(frozen=True)
class DataSignature:
    """Statistical fingerprint of a training window's input values."""

    mean: float
    std: float
    p10: float
    p50: float
    p90: float
    n: int


@dataclass(frozen=True)
class ModelVersion:
    """A trained, serialized model plus the fingerprint of its data.

    ``version_id`` is assigned by the knowledge store on insertion; a
    freshly fitted version carries 0 until stored.
    """

    version_id: int
    model_id: str
    trained_at_seq: int
    signature: DataSignature
    weights: bytes
    training_cost_j: float


def _as_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([s.lags for s in samples], dtype=np.float64)
    y = np.array([s.target for s in samples], dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != N_LAGS:
        raise InputError(f"samples must carry exactly {N_LAGS} lags")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise InputError("samples contain non-finite values")
    return X, y


def _nearest_rank(sorted_vals: np.ndarray, p: float) -> float:
    idx = max(1, math.ceil(p * len(sorted_vals)))
    return float(sorted_vals[idx - 1])


def signature(samples) -> DataSignature:
    """Fingerprint over the flattened lag values of the samples."""
    if len(samples) < 1:
        raise InsufficientDataError("signature requires at least one sample")
    X, _ = _as_arrays(samples)
    vals = X.ravel()
    srt = np.sort(vals)
    return DataSignature(
        mean=float(vals.mean()),
        std=float(vals.std()),
        p10=_nearest_rank(srt, 0.1),
        p50=_nearest_rank(srt, 0.5),
        p90=_nearest_rank(srt, 0.9),
        n=int(vals.size),
    )


def signature_distance(a: DataSignature, b: DataSignature) -> float:
    """Scale-aware distance used by the version-reuse check; d(a, a) = 0."""
    mean_term = abs(a.mean - b.mean) / max(b.std, SIG_EPS)
    std_term = abs(math.log((a.std + SIG_EPS) / (b.std + SIG_EPS)))
    return max(mean_term, std_term)


# --- weight serialization ------------------------------------------------
# Layout: u8 tag length, model_id bytes, u32 array count, u32 length per
# array, then every value as little-endian float64. Bit-exact round trip.


def _pack(model_id: str, arrays) -> bytes:
    tag = model_id.encode("utf-8")
    out = [struct.pack("<B", len(tag)), tag, struct.pack("<I", len(arrays))]
    flats = []
    for arr in arrays:
        flat = np.ascontiguousarray(arr, dtype=np.float64).ravel()
        out.append(struct.pack("<I", flat.size))
        flats.append(flat)
    for flat in flats:
        out.append(flat.astype("<f8").tobytes())
    return b"".join(out)


def _unpack(blob: bytes) -> tuple[str, list[np.ndarray]]:
    taglen = struct.unpack_from("<B", blob, 0)[0]
    model_id = blob[1 : 1 + taglen].decode("utf-8")
    off = 1 + taglen
    n_arrays = struct.unpack_from("<I", blob, off)[0]
    off += 4
    sizes = []
    for _ in range(n_arrays):
        sizes.append(struct.unpack_from("<I", blob, off)[0])
        off += 4
    arrays = []
    for size in sizes:
        arrays.append(np.frombuffer(blob, dtype="<f8", count=size, offset=off).copy())
        off += 8 * size
    return model_id, arrays


# --- ridge feature map ----------------------------------------------------


def _ridge_features(X: np.ndarray) -> np.ndarray:
    """5 lags plus all 15 pairwise products (i <= j), 20 columns."""
    cols = [X]
    for i in range(N_LAGS):
        for j in range(i, N_LAGS):
            cols.append((X[:, i] * X[:, j])[:, None])
    return np.hstack(cols)


# --- fitting ---------------------------------------------------------------


def fit(model_id: str, samples, seed: int, energy_cfg=None) -> ModelVersion:
    """Train a model on the samples; weights are fully seed-deterministic.

    ``energy_cfg`` prices the training cost; when omitted the cost is
    reported in raw cost units (joules_per_unit = 1).
    """
    desc = descriptor(model_id)
    if len(samples) < 10:
        raise InsufficientDataError(
            f"fit requires at least 10 samples, got {len(samples)}"
        )
    X, y = _as_arrays(samples)

    t0 = time.perf_counter()
    if model_id == "lin":
        A = np.hstack([np.ones((len(y), 1)), X])
        beta, *_ = np.linalg.lstsq(A, y, rcond=None)
        weights = _pack(model_id, [beta[1:], beta[:1]])
    elif model_id == "ridge2":
        weights = _fit_ridge(X, y)
    elif model_id == "mlp":
        weights = _fit_mlp(X, y, seed)
    else:  # pragma: no cover - descriptor() already rejects
        raise UnknownModelError(model_id)
    elapsed = time.perf_counter() - t0

    if energy_cfg is None:
        cost = float(desc.training_cost_units_per_sample * len(samples) * desc.training_epochs)
    else:
        from ..energy import measure_training

        cost = measure_training(
            desc, len(samples), desc.training_epochs, energy_cfg, elapsed_s=elapsed
        )

    return ModelVersion(
        version_id=0,
        model_id=model_id,
        trained_at_seq=-1,
        signature=signature(samples),
        weights=weights,
        training_cost_j=cost,
    )


def _fit_ridge(X: np.ndarray, y: np.ndarray, lam: float = RIDGE_LAMBDA) -> bytes:
    Phi = _ridge_features(X)
    m = Phi.mean(axis=0)
    s = Phi.std(axis=0)
    s = np.where(s == 0.0, 1.0, s)
    Z = (Phi - m) / s
    y_mean = y.mean()
    yc = y - y_mean
    if lam > 0.0:
        beta = np.linalg.solve(Z.T @ Z + lam * np.eye(Z.shape[1]), Z.T @ yc)
    else:
        beta, *_ = np.linalg.lstsq(Z, yc, rcond=None)
    return _pack("ridge2", [m, s, beta, np.array([y_mean])])


def _fit_mlp(X: np.ndarray, y: np.ndarray, seed: int) -> bytes:
    xm = X.mean(axis=0)
    xs = X.std(axis=0)
    xs = np.where(xs == 0.0, 1.0, xs)
    ym = y.mean()
    ys = y.std()
    if ys == 0.0:
        ys = 1.0
    Xs = (X - xm) / xs
    yn = (y - ym) / ys

    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-1.0, 1.0, size=(N_LAGS, MLP_HIDDEN)) / math.sqrt(N_LAGS)
    b1 = np.zeros(MLP_HIDDEN)
    w2 = rng.uniform(-1.0, 1.0, size=MLP_HIDDEN) / math.sqrt(MLP_HIDDEN)
    b2 = 0.0

    w1, b1, w2, b2, _ = kernels.gd_train(Xs, yn, w1, b1, w2, b2, MLP_LR, MLP_EPOCHS)
    return _pack(
        "mlp",
        [xm, xs, np.array([ym]), np.array([ys]), w1, b1, w2, np.array([b2])],
    )


# --- prediction ------------------------------------------------------------


def load_predictor(version: ModelVersion):
    """Deserialize once and return a fast ``lags -> prediction`` callable."""
    model_id, arrays = _unpack(version.weights)
    if model_id != version.model_id:
        raise InputError(
            f"weight blob tagged {model_id!r} does not match version model "
            f"{version.model_id!r}"
        )
    if model_id == "lin":
        coef, intercept = arrays
        b = float(intercept[0])

        def _predict_lin(lags: np.ndarray) -> float:
            return b + float(coef @ lags)

        return _predict_lin
    if model_id == "ridge2":
        m, s, beta, y_mean = arrays
        b = float(y_mean[0])
        scaled_beta = beta / s
        offset = b - float(scaled_beta @ m)

        def _predict_ridge(lags: np.ndarray) -> float:
            phi = _ridge_features(lags[None, :])[0]
            return offset + float(scaled_beta @ phi)

        return _predict_ridge
    if model_id == "mlp":
        xm, xs, ym, ys, w1f, b1, w2, b2 = arrays
        w1 = w1f.reshape(N_LAGS, -1)
        ymean, yscale = float(ym[0]), float(ys[0])
        bias = float(b2[0])

        def _predict_mlp(lags: np.ndarray) -> float:
            z = (lags - xm) / xs
            return ymean + yscale * kernels.forward_one(z, w1, b1, w2, bias)

        return _predict_mlp
    raise UnknownModelError(model_id)


def predict(version: ModelVersion, lags) -> float:
    """One prediction from a stored version; bit-stable for fixed inputs."""
    arr = np.asarray(lags, dtype=np.float64)
    if arr.shape != (N_LAGS,):
        raise InputError(f"expected {N_LAGS} lag values, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InputError("lags contain non-finite values")
    return load_predictor(version)(arr)


# --- introspection helpers (used by tests and diagnostics) ----------------


def linear_params(version: ModelVersion) -> tuple[float, np.ndarray]:
    """(intercept, 5 lag coefficients) of a ``lin`` version."""
    model_id, (coef, intercept) = _unpack(version.weights)
    if model_id != "lin":
        raise InputError("not a lin version")
    return float(intercept[0]), coef


def ridge_params(version: ModelVersion) -> tuple[float, np.ndarray]:
    """(intercept, 20 feature coefficients) mapped back to original scale."""
    model_id, (m, s, beta, y_mean) = _unpack(version.weights)
    if model_id != "ridge2":
        raise InputError("not a ridge2 version")
    scaled = beta / s
    intercept = float(y_mean[0]) - float(scaled @ m)
    return intercept, scaled


def training_loss_curve(samples, seed: int) -> np.ndarray:
    """Per-epoch training loss of an mlp fit; used for stability checks."""
    X, y = _as_arrays(samples)
    xm, xs = X.mean(axis=0), np.where(X.std(axis=0) == 0.0, 1.0, X.std(axis=0))
    ym, ys = y.mean(), y.std() if y.std() > 0 else 1.0
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-1.0, 1.0, size=(N_LAGS, MLP_HIDDEN)) / math.sqrt(N_LAGS)
    b1 = np.zeros(MLP_HIDDEN)
    w2 = rng.uniform(-1.0, 1.0, size=MLP_HIDDEN) / math.sqrt(MLP_HIDDEN)
    *_, losses = kernels.gd_train((X - xm) / xs, (y - ym) / ys, w1, b1, w2, 0.0, MLP_LR, MLP_EPOCHS)
    return losses
