"""Centralized numerical tolerances."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    reality: float = 1e-8          # |Im z| <= reality * max(1, |z|)
    rank: float = 1e-8             # relative to ||H||
    singular_pivot: float = 1e-12  # relative to ||a|| in mat_inv
    inverse_check: float = 1e-10   # a @ inv(a) == I within inverse_check * K
    max_condition: float = 1e7
    cluster: float = 1e-6          # multiplicity clustering radius, times scale
    root_residual: float = 1e-9    # normalized |p(z)| after polishing
    compat_residual: float = 1e-10
    max_iter: int = 200
    oracle_max_dim: int = 16

    def __post_init__(self):
        for name in ("reality", "rank", "singular_pivot", "inverse_check", "max_condition",
                     "cluster", "root_residual", "compat_residual"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT = Tolerances()
