"""FCA engine and qualitative soccer-result forecasting pipeline."""

from .fca import Concept, ConceptLattice, FormalContext, enumerate_concepts
from .implications import (
    AssociationRule,
    Implication,
    ImplicationBasis,
    armstrong_closure,
    follows,
    holds_in,
    mine_association_rules,
    respects,
    stem_basis,
    support,
)
from .inference import (
    Fact,
    Forecast,
    KnowledgeBase,
    PropagationMode,
    entails_with_certainty,
    forecast_match,
    infer,
    initial_confidence,
)
from .league import (
    LeagueDataset,
    MatchKind,
    MatchRecord,
    StandingsTable,
    TeamMeta,
    history,
    ingest,
    rescale_threshold,
    standings,
    week_zero_position,
)
from .attributes import (
    AttributeSpec,
    CompositeSpec,
    MonsterContext,
    Team,
    build_monster,
    evaluate,
    evaluate_composite,
    load_preset,
    load_specs,
    save_specs,
    strictness,
)
from .forecast import (
    BaselineConfig,
    EvaluationReport,
    InferenceSettings,
    SelectionPolicy,
    contextual_kb,
    evaluate as evaluate_pipeline,
    forecast_week,
    select_context,
)

__version__ = "0.1.0"
