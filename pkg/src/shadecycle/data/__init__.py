from .composite import phong_composite
from .generate import generate_corpus, import_real_directory, render_scene, sample_scene
from .io import decode_intrinsics, decode_real, encode_intrinsics, encode_real
from .manifest import (DatasetManifest, ManifestRecord, load_manifest, paired_records,
                       sample_unpaired_batch, save_manifest)
from .primitives import analytic_primitive_gbuffer, reflect_directions, sky_gradient
from .types import CameraSample, ImageTensor, IntrinsicMaps, PrimitiveScene

__all__ = [
    "CameraSample", "DatasetManifest", "ImageTensor", "IntrinsicMaps", "ManifestRecord",
    "PrimitiveScene", "analytic_primitive_gbuffer", "decode_intrinsics", "decode_real",
    "encode_intrinsics", "encode_real", "generate_corpus", "import_real_directory",
    "load_manifest",
    "paired_records", "phong_composite", "reflect_directions", "render_scene",
    "sample_scene", "sample_unpaired_batch", "save_manifest", "sky_gradient",
]
