"""Integer homomorphisms of bipartite graphs: counting, merging, containers, sampling."""

__version__ = "0.1.0"
