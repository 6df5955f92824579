"""segfuse: consensus fusion of human image segmentations, plus benchmarks.

Fuses multiple human segmentations of one image into a single consensus
segmentation by confidence-weighted masking and K-Modes clustering of
per-pixel categorical feature vectors, and evaluates segmentations with the
standard region benchmarks (GCE, VOI, PRI, BDE, covering).  BSDS ``.seg``
files and label rasters round-trip through :mod:`segfuse.segio`.

Typical use::

    from segfuse import load_group, fuse

    group = load_group("datasets/bsds300", "42049")
    consensus = fuse(group)
"""
from .bench import (
    PROTOCOL_ALL,
    PROTOCOL_LOO,
    BenchConfig,
    BenchRecord,
    BenchResult,
    evaluate_group,
    human_baseline,
    run_bench,
)
from .fusion import (
    FusionOptions,
    FusionResult,
    KClampedWarning,
    assign_global_ids,
    binarize_confidence_map,
    build_feature_vectors,
    canonical_member_order,
    compute_confidence_map,
    fuse,
    mask_feature_maps,
    run_fusion,
    select_cluster_count,
)
from .kmodes import (
    InitMethod,
    cluster,
    cluster_vectors,
    dissimilarity,
    init_attribute_density,
    init_vector_density,
    mode_of,
)
from .metrics import (
    BoundaryMap,
    ContingencyTable,
    bde,
    boundary_map,
    contingency,
    covering,
    gce,
    pri,
    score_against_refs,
    voi,
)
from .segio import (
    CoverageError,
    HeaderError,
    OverlapError,
    RunBoundsError,
    RunFormatError,
    SegFileHeader,
    SegParseError,
    list_image_ids,
    load_group,
    parse_seg,
    parse_seg_full,
    read_label_image,
    render_label_colors,
    save_color_render,
    write_label_image,
    write_seg,
)
from .types import (
    LABEL_DTYPE,
    METRIC_FIELDS,
    ClusterModel,
    ConfidenceMap,
    FeatureMap,
    FeatureVectorSet,
    ImageScores,
    LabelMap,
    MetricReport,
    SegmentationGroup,
    normalize_labels,
    partitions_equal,
    region_count,
)

__version__ = "0.1.0"

__all__ = [
    "LABEL_DTYPE",
    "METRIC_FIELDS",
    "PROTOCOL_ALL",
    "PROTOCOL_LOO",
    "BenchConfig",
    "BenchRecord",
    "BenchResult",
    "BoundaryMap",
    "ClusterModel",
    "ConfidenceMap",
    "ContingencyTable",
    "CoverageError",
    "FeatureMap",
    "FeatureVectorSet",
    "FusionOptions",
    "FusionResult",
    "HeaderError",
    "ImageScores",
    "InitMethod",
    "KClampedWarning",
    "LabelMap",
    "MetricReport",
    "OverlapError",
    "RunBoundsError",
    "RunFormatError",
    "SegFileHeader",
    "SegParseError",
    "SegmentationGroup",
    "assign_global_ids",
    "bde",
    "binarize_confidence_map",
    "boundary_map",
    "build_feature_vectors",
    "canonical_member_order",
    "cluster",
    "cluster_vectors",
    "compute_confidence_map",
    "contingency",
    "covering",
    "dissimilarity",
    "evaluate_group",
    "fuse",
    "gce",
    "human_baseline",
    "init_attribute_density",
    "init_vector_density",
    "list_image_ids",
    "load_group",
    "mask_feature_maps",
    "mode_of",
    "normalize_labels",
    "parse_seg",
    "parse_seg_full",
    "partitions_equal",
    "pri",
    "read_label_image",
    "region_count",
    "render_label_colors",
    "run_bench",
    "run_fusion",
    "save_color_render",
    "score_against_refs",
    "select_cluster_count",
    "voi",
    "write_label_image",
    "write_seg",
]
