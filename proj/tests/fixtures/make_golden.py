"""Writes the golden SMF model, its input tensor and a numpy reference prediction."""

import hashlib
import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent / "golden"
rng = np.random.default_rng(314159)

C, H, W = 2, 6, 6
conv_w = rng.uniform(-0.8, 0.8, size=(3, C, 3, 3)).astype(np.float32)
conv_b = rng.uniform(-0.2, 0.2, size=(3,)).astype(np.float32)
dense_w = rng.uniform(-0.5, 0.5, size=(4, 27)).astype(np.float32)
dense_b = rng.uniform(-0.1, 0.1, size=(4,)).astype(np.float32)
x = rng.uniform(0.0, 1.0, size=(C, H, W)).astype(np.float32)

blob = np.concatenate([conv_w.ravel(), conv_b, dense_w.ravel(), dense_b]).astype("<f4").tobytes()


def forward(image):
    a = image.astype(np.float64)
    padded = np.pad(a, ((0, 0), (1, 1), (1, 1)))
    conv = np.zeros((3, H, W))
    for o in range(3):
        for r in range(H):
            for c in range(W):
                conv[o, r, c] = conv_b[o] + np.sum(conv_w[o].astype(np.float64) * padded[:, r:r + 3, c:c + 3])
    relu = np.maximum(conv, 0.0)
    pooled = relu.reshape(3, H // 2, 2, W // 2, 2).max(axis=(2, 4))
    z = dense_w.astype(np.float64) @ pooled.ravel() + dense_b.astype(np.float64)
    e = np.exp(z - z.max())
    return (e / e.sum()).tolist()


n_conv = conv_w.size + conv_b.size
layers = [
    {"kind": "conv2d", "in_channels": C, "out_channels": 3, "kernel_h": 3, "kernel_w": 3,
     "stride": 1, "padding": 1, "weight_offset": 0, "bias_offset": conv_w.size},
    {"kind": "relu"},
    {"kind": "maxpool2x2"},
    {"kind": "flatten"},
    {"kind": "dense", "in_dim": 27, "out_dim": 4, "weight_offset": n_conv,
     "bias_offset": n_conv + dense_w.size},
    {"kind": "softmax"},
]
digest = hashlib.sha256(blob).hexdigest()
manifest = {"format": "SMF", "version": 1, "dtype": "f32le", "input_shape": [C, H, W],
            "num_classes": 4, "layers": layers, "blob": "weights.bin", "blob_sha256": digest}

OUT.mkdir(parents=True, exist_ok=True)
(OUT / "weights.bin").write_bytes(blob)
(OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
(OUT / "input.f32").write_bytes(x.astype("<f4").tobytes())
(OUT / "input.tf32.json").write_text(
    json.dumps({"dtype": "f32le", "shape": [C, H, W], "data": "input.f32"}) + "\n")
(OUT / "expected.json").write_text(
    json.dumps({"blob_sha256": digest, "prediction": forward(x)}, indent=2) + "\n")
