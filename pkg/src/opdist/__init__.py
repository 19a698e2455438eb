"""Opinion distance: compare free-text opinions by the polarity they express toward shared subjects."""
from ._backend import BACKEND
from .corpus import Dataset, Opinion, load_conllu, load_opinions, tokenize
from .distance import DifferenceFn, DistanceMatrix, distance_matrix, opinion_distance
from .lexicon import load_sentiment_lexicon, load_shifters
from .matching import cost_matrix, flow_to_mapping, solve_transport
from .polarity import OpinionRepresentation, RepresentConfig, represent_opinion
from .spotter import Gazetteer, spot

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Dataset",
    "DifferenceFn",
    "DistanceMatrix",
    "Gazetteer",
    "Opinion",
    "OpinionRepresentation",
    "RepresentConfig",
    "cost_matrix",
    "distance_matrix",
    "flow_to_mapping",
    "load_conllu",
    "load_opinions",
    "load_sentiment_lexicon",
    "load_shifters",
    "opinion_distance",
    "represent_opinion",
    "solve_transport",
    "spot",
    "tokenize",
]
