from .spectrum import (
    N_LAGS,
    DataSignature,
    ModelDescriptor,
    ModelVersion,
    WindowSample,
    descriptor,
    fit,
    linear_params,
    load_predictor,
    predict,
    ridge_params,
    signature,
    signature_distance,
    spectrum,
    training_loss_curve,
)

__all__ = [
    "N_LAGS",
    "DataSignature",
    "ModelDescriptor",
    "ModelVersion",
    "WindowSample",
    "descriptor",
    "fit",
    "linear_params",
    "load_predictor",
    "predict",
    "ridge_params",
    "signature",
    "signature_distance",
    "spectrum",
    "training_loss_curve",
]
