"""claimsbench: synthetic claims-record benchmarks for IPTW treatment-effect
estimation under time-dependent confounding."""

__version__ = "0.1.0"
