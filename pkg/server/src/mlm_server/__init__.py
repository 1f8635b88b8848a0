"""Reference fill-mask sidecar: wraps a pretrained masked LM behind the
same wire protocol the in-process mock backend speaks, so the expansion
pipeline can run against a real model."""

__version__ = "0.1.0"
