"""Guided anisotropic diffusion for edge-preserving filtering of label maps,
probabilities and attention weights."""

from ._core import (
    MAX_STABLE_LAMBDA,
    GadError,
    GadIOError,
    anisotropic_diffuse,
    attention_backward,
    attention_forward,
    binarize,
    boundary_mask,
    cleanse,
    dice,
    gad_filter,
    global_accuracy,
    global_average_pool,
    merge,
    num_threads,
    read_field,
    refine_upsampled,
    set_num_threads,
    sharpen_attention,
    simulate_low_res,
    write_field,
)

__all__ = [
    "MAX_STABLE_LAMBDA",
    "GadError",
    "GadIOError",
    "anisotropic_diffuse",
    "attention_backward",
    "attention_forward",
    "binarize",
    "boundary_mask",
    "cleanse",
    "dice",
    "gad_filter",
    "global_accuracy",
    "global_average_pool",
    "merge",
    "num_threads",
    "read_field",
    "refine_upsampled",
    "set_num_threads",
    "sharpen_attention",
    "simulate_low_res",
    "write_field",
]
