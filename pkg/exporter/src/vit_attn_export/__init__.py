"""Attention-map exporter for pretrained vision encoders."""

from .export import (
    ExportError,
    ExportRequest,
    export_attention,
    export_from_components,
    load_components,
    load_image,
    resolve_layer,
)

__version__ = "0.1.0"
