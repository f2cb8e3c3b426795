"""Online orchestration: decision, anaphora resolution, disambiguation,
schema linking, masked-retrieval generation, reflection, execution, and
response building, with multi-turn session state."""

from askgraph.pipeline.state import (
    AgentTurn,
    Candidate,
    PendingDisambiguation,
    PipelineConfig,
    ScriptAttempt,
    SessionState,
)
from askgraph.pipeline.engine import Pipeline

__all__ = [
    "AgentTurn",
    "Candidate",
    "PendingDisambiguation",
    "PipelineConfig",
    "ScriptAttempt",
    "SessionState",
    "Pipeline",
]
