# Copyright 2026 The iid Authors
# SPDX-License-Identifier: Apache-2.0
"""Prior-driven intrinsic image decomposition.

Shadow-free and specular-free image transforms, a per-image
reflectance/shading solver, the matching loss suite, and evaluation
metrics. All array arguments are float64 numpy arrays shaped (H, W) or
(H, W, 3) with values in linear RGB.
"""

from iid._core import (  # noqa: F401
    IidError,
    __version__,
    cam_attention,
    chromaticity,
    colored_shadowfree,
    decompose,
    downsample,
    entropy_profile,
    gen_shadow_scene,
    gen_specular_scene,
    gradient,
    instance_norm,
    invariant_grayscale,
    layer_norm,
    lin_norm,
    linear_to_srgb,
    load_image,
    load_judgments,
    loss_adversarial,
    loss_classification,
    luminance,
    min_entropy_angle,
    save_image,
    si_lmse,
    si_mse,
    specular_free,
    specular_free_full,
    specular_free_gray,
    srgb_to_linear,
    total_stage1,
    whdr,
)
