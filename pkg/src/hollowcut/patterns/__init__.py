"""Classical image pipeline: binarization, cut-out extraction, tracing,
vectorization, shape description, default classification, and point-prompted
segmentation."""

from .classify import (
    SAWTOOTH_SIMPLIFY_PX,
    SAWTOOTH_THRESHOLD,
    classify_unit_pattern,
    detect_sawtooth,
)
from .cutouts import BBox, CutoutMask, extract_cutouts
from .descriptors import ShapeDescriptor, descriptors
from .raster import as_binary, binarize, label_foreground, otsu_threshold
from .segment import segment_by_points
from .trace import (
    VectorPath,
    boundary_loops,
    rasterize_path,
    simplify_closed,
    subpath_area,
    subpath_length,
    trace_contour,
    vectorize,
)

__all__ = [
    "BBox",
    "CutoutMask",
    "SAWTOOTH_SIMPLIFY_PX",
    "SAWTOOTH_THRESHOLD",
    "ShapeDescriptor",
    "VectorPath",
    "as_binary",
    "binarize",
    "boundary_loops",
    "classify_unit_pattern",
    "descriptors",
    "detect_sawtooth",
    "extract_cutouts",
    "label_foreground",
    "otsu_threshold",
    "rasterize_path",
    "segment_by_points",
    "simplify_closed",
    "subpath_area",
    "subpath_length",
    "trace_contour",
    "vectorize",
]
