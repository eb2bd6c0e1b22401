"""dagquot: realize finite colored DAGs as lattices of normal subgroups of
free groups, verify the realization with decidable algebraic certificates,
and transfer realizations into finitely presented ambient groups along
user-supplied CEP embeddings."""

__version__ = "0.1.0"
