"""Export multi-head attention maps from a vision encoder to NPY.

The output is a (heads, tokens, tokens) float32 little-endian C-order
array, written with a plain ``numpy.save`` so any NPY reader can
consume it. By default the leading class-token row and column are
stripped (CLIP/ViT encoders prepend it at index 0) so the token count
equals the patch count; stripping rescales nothing, the raw submatrix
is written as-is.

Post-softmax attention probabilities are exported by default. The
``pre_softmax`` flag instead recomputes the scaled q/k logits of the
selected layer through a forward pre-hook, which requires a CLIP-style
attention module (q_proj/k_proj with num_heads/head_dim attributes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch


class ExportError(Exception):
    """Model resolution, image decoding, or extraction failed."""


@dataclass(frozen=True)
class ExportRequest:
    model: str
    image: str
    out: str
    layer: str = "penultimate"
    include_cls: bool = False
    pre_softmax: bool = False


def resolve_layer(selector: str, n_layers: int) -> int:
    """Map a layer selector to a 0-based encoder layer index."""
    if selector == "penultimate":
        if n_layers < 2:
            raise ExportError(f"'penultimate' needs at least 2 layers, model has {n_layers}")
        return n_layers - 2
    try:
        idx = int(selector)
    except ValueError:
        raise ExportError(f"layer must be an integer or 'penultimate', got {selector!r}")
    if idx < 0:
        idx += n_layers
    if not 0 <= idx < n_layers:
        raise ExportError(f"layer {selector} out of range for a {n_layers}-layer encoder")
    return idx


def load_components(model_id: str):
    """Resolve a pretrained encoder and its image processor.

    Loads with eager attention so attention maps are materialized.
    CLIP-style dual models are unwrapped to their vision tower.
    """
    from transformers import AutoImageProcessor, AutoModel

    try:
        processor = AutoImageProcessor.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id, attn_implementation="eager")
    except Exception as exc:
        raise ExportError(f"cannot resolve model {model_id!r}: {exc}") from exc
    model = getattr(model, "vision_model", model)
    model.eval()
    return model, processor


def load_image(path: str):
    from PIL import Image

    try:
        with Image.open(path) as img:
            return img.convert("RGB")
    except (OSError, ValueError) as exc:
        raise ExportError(f"cannot decode image {path!r}: {exc}") from exc


def _attention_modules(model) -> list:
    return [
        m
        for _, m in model.named_modules()
        if all(hasattr(m, a) for a in ("q_proj", "k_proj", "num_heads", "head_dim"))
    ]


def _pre_softmax_attention(model, pixel_values, layer: str):
    modules = _attention_modules(model)
    if not modules:
        raise ExportError(
            "pre-softmax export needs CLIP-style attention modules (q_proj/k_proj)"
        )
    idx = resolve_layer(layer, len(modules))
    target = modules[idx]
    captured = {}

    def grab(module, args, kwargs):
        captured["hidden"] = kwargs.get("hidden_states", args[0] if args else None)

    handle = target.register_forward_pre_hook(grab, with_kwargs=True)
    try:
        model(pixel_values=pixel_values)
    finally:
        handle.remove()
    hidden = captured.get("hidden")
    if hidden is None:
        raise ExportError("selected attention module was never reached in the forward pass")
    batch, tokens, _ = hidden.shape
    heads, head_dim = target.num_heads, target.head_dim
    q = target.q_proj(hidden).reshape(batch, tokens, heads, head_dim).transpose(1, 2)
    k = target.k_proj(hidden).reshape(batch, tokens, heads, head_dim).transpose(1, 2)
    scale = getattr(target, "scale", None) or getattr(target, "scaling", None) or head_dim**-0.5
    return q @ k.transpose(-1, -2) * scale, idx


def export_from_components(
    model,
    processor,
    image,
    out: str,
    *,
    layer: str = "penultimate",
    include_cls: bool = False,
    pre_softmax: bool = False,
) -> dict:
    """Run one image through ``model`` and write the chosen layer's maps.

    Returns a summary dict with heads, tokens, layer index, and path.
    """
    pixel_values = processor(images=image, return_tensors="pt")["pixel_values"]
    with torch.no_grad():
        if pre_softmax:
            attn, idx = _pre_softmax_attention(model, pixel_values, layer)
        else:
            outputs = model(pixel_values=pixel_values, output_attentions=True)
            attentions = getattr(outputs, "attentions", None)
            if not attentions or attentions[0] is None:
                raise ExportError(
                    "model returned no attention maps; load it with eager attention"
                )
            idx = resolve_layer(layer, len(attentions))
            attn = attentions[idx]
    maps = attn[0].to(torch.float32).cpu().numpy()
    if not include_cls:
        if maps.shape[1] < 2:
            raise ExportError("cannot strip the class token from a single-token map")
        maps = maps[:, 1:, 1:]
    maps = np.ascontiguousarray(maps, dtype="<f4")
    with open(out, "wb") as fh:
        np.save(fh, maps)
    return {"heads": int(maps.shape[0]), "tokens": int(maps.shape[1]), "layer": idx, "path": out}


def export_attention(req: ExportRequest) -> dict:
    model, processor = load_components(req.model)
    image = load_image(req.image)
    return export_from_components(
        model,
        processor,
        image,
        req.out,
        layer=req.layer,
        include_cls=req.include_cls,
        pre_softmax=req.pre_softmax,
    )
