"""Statistical analysis of wordnets as (interconnected) directed networks."""
from .model import (
    ANTONYM,
    HOLONYM,
    HYPERNYM,
    HYPONYM,
    I_SYNONYMY,
    MERONYM,
    BilayerNetwork,
    InterlingualLink,
    Lexeme,
    LinkType,
    ParseError,
    PartOfSpeech,
    RelationEdge,
    RelationType,
    SupremacyConfig,
    Synset,
    UnknownSynset,
    WordnetError,
    WordnetGraph,
    validate_graph,
)

__version__ = "0.1.0"
