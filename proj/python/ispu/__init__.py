"""Python bindings for the in-sensor activity-recognition pipeline."""

from ._core import (
    Acquisition,
    BinaryModel,
    CalibrationTable,
    ClassLabel,
    FeatureExtractor,
    FloatModel,
    IspuError,
    ModelArchitecture,
    Pipeline,
    architecture_catalog,
    binarize,
    binary_infer,
    canonical_macs,
    estimate_energy_uj,
    estimate_latency,
    float_infer,
    fold_bn_threshold,
    generate,
    infer,
    load_model,
    make_cost_report,
    make_model,
    memory_footprint,
    pad_input,
    paper_macs,
    parse_architecture,
    parse_model,
    published_macs,
    save_model,
    serialize_model,
    softmax,
    speedup,
    window_mean,
    window_median,
    window_minmax,
    window_variance,
    xnor_dot,
)

__all__ = [name for name in dir() if not name.startswith("_")]
