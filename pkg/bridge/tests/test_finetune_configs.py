from pathlib import Path

from tokmap_bridge.finetune_configs import FINETUNE_PHASES, PHASES, emit_finetune_configs

GOLDEN = Path(__file__).parent / "golden"


def test_emitted_files_match_golden(tmp_path):
    paths = emit_finetune_configs(tmp_path)
    assert [p.name for p in paths] == [
        "phase1_embedding.json", "phase2_grammatical.json", "phase3_knowledge.json"]
    for path in paths:
        assert path.read_bytes() == (GOLDEN / path.name).read_bytes()


def test_phase_values_field_for_field():
    e, g, k = (FINETUNE_PHASES[p] for p in PHASES)
    assert (e["learning_rate"], g["learning_rate"], k["learning_rate"]) == \
        (5e-5, 5e-5, 2e-5)
    assert (e["warmup_steps"], g["warmup_steps"], k["warmup_steps"]) == \
        (5000, 1000, 2000)
    assert (e["training_steps"], g["training_steps"], k["training_steps"]) == \
        (150000, 25000, 25000)
    assert (e["total_batch_size"], g["total_batch_size"], k["total_batch_size"]) == \
        (32, 256, 256)
    assert (e["gradient_accumulation_steps"], g["gradient_accumulation_steps"],
            k["gradient_accumulation_steps"]) == (8, 64, 64)
    for phase in (e, g, k):
        assert phase["per_device_train_batch_size"] == 4
        assert phase["weight_decay"] == 0.01
        assert phase["fp16"] is True


def test_scope_strings():
    assert FINETUNE_PHASES["embedding"]["trainable_scope"] == \
        "embedding weights and the language modeling head"
    assert "the bottom two and top two Transformer layers" in \
        FINETUNE_PHASES["grammatical"]["trainable_scope"]
    assert FINETUNE_PHASES["knowledge"]["trainable_scope"] == \
        "all remaining Transformer layers"
