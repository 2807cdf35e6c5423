"""Bridge between transformer checkpoints and the embedding exchange format."""

from .checkpoint import (
    CheckpointError,
    export_embeddings,
    find_embedding_key,
    import_embeddings,
    load_checkpoint_vocab,
    load_state_dict,
)
from .exchange import (
    ExchangeFormatError,
    read_exchange,
    read_vocab,
    write_exchange,
    write_vocab,
)
from .finetune_configs import FINETUNE_PHASES, PHASES, emit_finetune_configs

__version__ = "0.1.0"

__all__ = [
    "CheckpointError",
    "ExchangeFormatError",
    "FINETUNE_PHASES",
    "PHASES",
    "emit_finetune_configs",
    "export_embeddings",
    "find_embedding_key",
    "import_embeddings",
    "load_checkpoint_vocab",
    "load_state_dict",
    "read_exchange",
    "read_vocab",
    "write_exchange",
    "write_vocab",
]
