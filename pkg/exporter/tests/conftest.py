import numpy as np
import pytest
import torch
from PIL import Image
from transformers import CLIPImageProcessor, CLIPVisionConfig, CLIPVisionModel


@pytest.fixture(scope="session")
def tiny_vitl_geometry():
    """Randomly initialized encoder with ViT-L/14-336 attention geometry.

    336px input / 14px patches give the 24x24 = 576 patch grid and 16
    heads of the production encoder, but with a thin hidden size and
    only 3 layers so tests stay fast and fully offline.
    """
    torch.manual_seed(0)
    config = CLIPVisionConfig(
        hidden_size=128,
        num_attention_heads=16,
        num_hidden_layers=3,
        intermediate_size=256,
        image_size=336,
        patch_size=14,
    )
    model = CLIPVisionModel._from_config(config, attn_implementation="eager")
    model.eval()
    return model


@pytest.fixture(scope="session")
def processor_336():
    return CLIPImageProcessor(
        size={"shortest_edge": 336}, crop_size={"height": 336, "width": 336}
    )


@pytest.fixture(scope="session")
def test_image(tmp_path_factory):
    rng = np.random.default_rng(42)
    img = Image.fromarray(rng.integers(0, 255, size=(400, 520, 3), dtype=np.uint8))
    path = tmp_path_factory.mktemp("img") / "noise.png"
    img.save(path)
    return path
