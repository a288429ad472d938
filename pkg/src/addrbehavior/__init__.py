"""Address-behavior analytics over Bitcoin-style block ledgers.

Builds a directed heterogeneous multigraph of address and transaction
nodes, extracts structure-preserving k-hop subgraphs, computes a 148-value
per-address feature vector (132 statistical + 16 local-structural), and
runs a reproducible dataset pipeline (normalize, split, KNN baseline,
correlation, ranking, per-label summaries).
"""

__version__ = "0.1.0"
