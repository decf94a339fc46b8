import json

import pytest
from PIL import Image


def make_image(path, color, size=(24, 16)):
    Image.new("RGB", size, color).save(path)


def tree_json(nodes):
    return json.dumps({"domain": "portrait age", "nodes": nodes})


# complete two-level tree: root plus both branch nodes
TWO_LEVEL_NODES = [
    {"level": 1, "path": [], "prompts": ["a young person", "an old person"]},
    {"level": 2, "path": [0], "prompts": ["a child", "a teenager"]},
    {"level": 2, "path": [1], "prompts": ["a middle aged person", "an elderly person"]},
]


@pytest.fixture
def image_dir(tmp_path):
    d = tmp_path / "images"
    d.mkdir()
    make_image(d / "r.png", (200, 30, 30))
    make_image(d / "g.png", (30, 200, 30))
    make_image(d / "b.png", (30, 30, 200))
    return d


@pytest.fixture
def tree_path(tmp_path):
    p = tmp_path / "prompt_tree.json"
    p.write_text(tree_json(TWO_LEVEL_NODES), encoding="utf-8")
    return p
