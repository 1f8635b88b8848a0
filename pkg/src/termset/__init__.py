"""Term set expansion: mine indicative masked patterns from a corpus, then
expand a small seed set either by aggregating masked-LM completions (mpb1)
or by pattern-similarity search over candidate occurrences (mpb2)."""

__version__ = "0.1.0"

from termset.mlm import MASK, MaskedPattern

__all__ = ["MASK", "MaskedPattern", "__version__"]
