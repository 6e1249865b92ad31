from .base import (
    DEFAULT_TEMPLATE,
    CanonicalKeyOracle,
    EquivalenceOracle,
    ProposalBatch,
    Proposer,
    ProposerConfig,
    group_equivalent,
)
from .live import ChatClient, LiveProposer
from .scripted import ScriptEntry, ScriptedProposer, load_script, quota_counts

__all__ = [
    "DEFAULT_TEMPLATE",
    "CanonicalKeyOracle",
    "ChatClient",
    "EquivalenceOracle",
    "LiveProposer",
    "ProposalBatch",
    "Proposer",
    "ProposerConfig",
    "ScriptEntry",
    "ScriptedProposer",
    "group_equivalent",
    "load_script",
    "quota_counts",
]
