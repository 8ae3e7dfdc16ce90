"""ltiphdr fuses exposure brackets in logarithmic-type image algebras."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("ltiphdr")
except PackageNotFoundError:
    __version__ = "uninstalled"

from ltiphdr._algebra import (
    EPSILON,
    LIP,
    LTIP,
    PIXEL_MAX,
    REAL,
    Algebra,
    ClassicalLipAlgebra,
    LtipAlgebra,
    ParametricLtipAlgebra,
    RealAlgebra,
    create_algebra,
    ltip_add,
    ltip_smul,
    ltip_sub,
    phi,
    phi_inv,
)
from ltiphdr._config import RunConfig, parse_config, read_config
from ltiphdr._crf import (
    CrfCurve,
    CrfFit,
    CrfReport,
    compare_crf,
    fit_gain,
    format_dorf,
    load_dorf,
    parse_dorf,
    synthetic_curve,
)
from ltiphdr._errors import (
    ConfigError,
    DomainError,
    DorfError,
    ExposureTimeError,
    FusionError,
    ImageIOError,
    LtipError,
    LutError,
    ShapeError,
)
from ltiphdr._fusion import (
    FusionConfig,
    build_pyramids,
    from_transform_space,
    fuse,
    fuse_flat,
    fuse_flat_algebraic,
    fuse_pyramid,
    to_transform_space,
)
from ltiphdr._hvs import HvsParams, michaelis_menten, naka_rushton
from ltiphdr._image import ExposedFrame, clamp_pixels, luminance
from ltiphdr._io import (
    decode_frames,
    encode_image,
    expand_inputs,
    read_image,
    read_pfm,
    write_pfm,
)
from ltiphdr._irradiance import (
    EquivalenceReport,
    IrradianceMap,
    merge_irradiance,
    recover_irradiance,
    tonemap_ltip,
    verify_equivalence,
)
from ltiphdr._lut import Lut, build_lut
from ltiphdr._metrics import (
    NaturalnessParams,
    QualityReport,
    QualityWeights,
    assess_quality,
    overall_quality,
    rmse_to_baseline,
    ssim,
    ssim_to_baseline,
    statistical_naturalness,
    structural_fidelity,
)
from ltiphdr._parallel import TilePool
from ltiphdr._pyramid import Pyramid, collapse, gaussian_pyramid, laplacian_pyramid
from ltiphdr._synthetic import synthetic_bracket, synthetic_scene
from ltiphdr._util import parse_exposure_times, serialize_exposure_times
from ltiphdr._weights import (
    WeightParams,
    WeightStack,
    combine_weights,
    compute_weights,
    contrast_weight,
    normalize_stack,
    saturation_weight,
    well_exposedness_weight,
)

__all__ = [
    "EPSILON",
    "LIP",
    "LTIP",
    "PIXEL_MAX",
    "REAL",
    "Algebra",
    "ClassicalLipAlgebra",
    "ConfigError",
    "CrfCurve",
    "CrfFit",
    "CrfReport",
    "DomainError",
    "DorfError",
    "EquivalenceReport",
    "ExposedFrame",
    "ExposureTimeError",
    "FusionConfig",
    "FusionError",
    "HvsParams",
    "ImageIOError",
    "IrradianceMap",
    "LtipAlgebra",
    "LtipError",
    "Lut",
    "LutError",
    "NaturalnessParams",
    "ParametricLtipAlgebra",
    "Pyramid",
    "QualityReport",
    "QualityWeights",
    "RealAlgebra",
    "RunConfig",
    "ShapeError",
    "TilePool",
    "WeightParams",
    "WeightStack",
    "__version__",
    "assess_quality",
    "build_lut",
    "build_pyramids",
    "clamp_pixels",
    "collapse",
    "combine_weights",
    "compare_crf",
    "compute_weights",
    "contrast_weight",
    "create_algebra",
    "decode_frames",
    "encode_image",
    "expand_inputs",
    "fit_gain",
    "format_dorf",
    "from_transform_space",
    "fuse",
    "fuse_flat",
    "fuse_flat_algebraic",
    "fuse_pyramid",
    "gaussian_pyramid",
    "laplacian_pyramid",
    "load_dorf",
    "ltip_add",
    "ltip_smul",
    "ltip_sub",
    "luminance",
    "merge_irradiance",
    "michaelis_menten",
    "naka_rushton",
    "normalize_stack",
    "overall_quality",
    "parse_config",
    "parse_dorf",
    "parse_exposure_times",
    "phi",
    "phi_inv",
    "read_config",
    "read_image",
    "read_pfm",
    "recover_irradiance",
    "rmse_to_baseline",
    "saturation_weight",
    "serialize_exposure_times",
    "ssim",
    "ssim_to_baseline",
    "statistical_naturalness",
    "structural_fidelity",
    "synthetic_bracket",
    "synthetic_curve",
    "to_transform_space",
    "tonemap_ltip",
    "verify_equivalence",
    "well_exposedness_weight",
    "write_pfm",
]
