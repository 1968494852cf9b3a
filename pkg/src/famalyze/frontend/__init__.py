"""Front end: lexing, parsing, scope checking, labelling and printing."""

from . import ast
from .labels import label, locations
from .parser import parse, parse_feature_expr, tokenize
from .pretty import pretty

__all__ = ["ast", "label", "locations", "parse", "parse_feature_expr", "pretty", "tokenize"]
