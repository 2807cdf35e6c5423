"""The three staged finetuning configurations used after conversion.

Phase 1 adapts the fresh embedding table (everything else frozen), phase
2 opens the grammar-sensitive edge layers, phase 3 unfreezes the rest of
the network at a lower learning rate.
"""

from __future__ import annotations

import json
from pathlib import Path

PHASES = ("embedding", "grammatical", "knowledge")

FINETUNE_PHASES: dict[str, dict] = {
    "embedding": {
        "phase": "embedding",
        "trainable_scope": "embedding weights and the language modeling head",
        "per_device_train_batch_size": 4,
        "gradient_accumulation_steps": 8,
        "total_batch_size": 32,
        "training_steps": 150000,
        "learning_rate": 5e-5,
        "warmup_steps": 5000,
        "weight_decay": 0.01,
        "fp16": True,
    },
    "grammatical": {
        "phase": "grammatical",
        "trainable_scope": ("embedding weights and the language modeling head, "
                            "and the bottom two and top two Transformer layers"),
        "per_device_train_batch_size": 4,
        "gradient_accumulation_steps": 64,
        "total_batch_size": 256,
        "training_steps": 25000,
        "learning_rate": 5e-5,
        "warmup_steps": 1000,
        "weight_decay": 0.01,
        "fp16": True,
    },
    "knowledge": {
        "phase": "knowledge",
        "trainable_scope": "all remaining Transformer layers",
        "per_device_train_batch_size": 4,
        "gradient_accumulation_steps": 64,
        "total_batch_size": 256,
        "training_steps": 25000,
        "learning_rate": 2e-5,
        "warmup_steps": 2000,
        "weight_decay": 0.01,
        "fp16": True,
    },
}


def emit_finetune_configs(out_dir) -> list[Path]:
    """Write one JSON config per phase; returns the three paths in order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, phase in enumerate(PHASES, start=1):
        path = out / f"phase{index}_{phase}.json"
        path.write_text(
            json.dumps(FINETUNE_PHASES[phase], indent=2) + "\n",
            encoding="utf-8")
        paths.append(path)
    return paths
