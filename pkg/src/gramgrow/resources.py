"""Shipped resource bundles (demonstration grammar, CLAWS tag lexicon)."""

from importlib import resources

from .fs import FeatureRegistry
from .grammar import Grammar, Lexicon, ParaphraseMap


def data_path(name):
    return resources.files("gramgrow").joinpath("data", name)


def load_demo():
    """Registry, grammar, lexicon and label map of the demonstration bundle."""
    registry = FeatureRegistry.load(data_path("demo.features"))
    grammar = Grammar(registry)
    grammar.load_rules(data_path("demo.grammar"))
    lexicon = Lexicon.load(data_path("demo.lexicon"), registry)
    labels = ParaphraseMap.load(data_path("demo.labels"), registry)
    return registry, grammar, lexicon, labels


def load_claws():
    """Registry, lexicon and label map for the CLAWS tag set (no grammar)."""
    registry = FeatureRegistry.load(data_path("claws.features"))
    lexicon = Lexicon.load(data_path("claws.lexicon"), registry)
    labels = ParaphraseMap.load(data_path("claws.labels"), registry)
    return registry, lexicon, labels
