from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from . import defaults
from .baselines import DecayPolicy
from .engine import UpdateMode
from .errors import UnknownModel
from .status import StatusDistribution

MODEL_NAMES: tuple[str, ...] = ("u", "i", "csf", "fsm", "rb")


def split_list(s: str) -> tuple[str, ...]:
    parts = [p.strip() for p in s.replace(",", " ").split()]
    return tuple(p for p in parts if p)


def parse_prior(text: str) -> tuple[str, StatusDistribution]:
    """'uniform', 'informed', or three comma-separated probabilities for I, A, F."""
    key = (text or "").strip().lower()
    if key == "uniform":
        return "uniform", StatusDistribution.of(defaults.UNIFORM_PRIOR)
    if key == "informed":
        return "informed", StatusDistribution.of(defaults.INFORMED_PRIOR)

    parts = split_list(key)
    if len(parts) != 3:
        raise ValueError(f"prior must be 'uniform', 'informed' or 'pI,pA,pF', got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"prior values must be numbers, got {text!r}") from None
    if abs(math.fsum(values) - 1.0) > defaults.SUM_TOLERANCE:
        raise ValueError(f"custom prior must sum to 1, got {math.fsum(values)!r}")
    return "custom", StatusDistribution.of(values)


def parse_models(s: str | tuple[str, ...]) -> tuple[str, ...]:
    models = split_list(s) if isinstance(s, str) else tuple(s)
    if not models:
        raise ValueError("at least one model is required")
    for m in models:
        if m not in MODEL_NAMES:
            raise UnknownModel(f"unknown model {m!r}; choose from {', '.join(MODEL_NAMES)}")
    if len(set(models)) != len(models):
        raise ValueError(f"model listed twice: {', '.join(models)}")
    return models


@dataclass(frozen=True)
class RunConfig:
    prior: StatusDistribution
    prior_name: str = defaults.DEFAULT_PRIOR
    mode: UpdateMode = UpdateMode(defaults.DEFAULT_MODE)
    alpha: float = defaults.DEFAULT_ALPHA
    fsm_decay: DecayPolicy = DecayPolicy(defaults.DEFAULT_FSM_DECAY)
    seed: int = defaults.DEFAULT_SEED
    models: tuple[str, ...] = defaults.DEFAULT_MODELS
    workers: int = defaults.DEFAULT_WORKERS
    score_tied_gold: bool = False
    exact_mcnemar: bool = False

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        parse_models(self.models)

    @staticmethod
    def defaults() -> "RunConfig":
        name, prior = parse_prior(defaults.DEFAULT_PRIOR)
        return RunConfig(prior=prior, prior_name=name)

    @staticmethod
    def from_args(args: Any) -> "RunConfig":
        name, prior = parse_prior(getattr(args, "prior", defaults.DEFAULT_PRIOR))
        return RunConfig(
            prior=prior,
            prior_name=name,
            mode=UpdateMode(getattr(args, "mode", defaults.DEFAULT_MODE)),
            alpha=float(getattr(args, "alpha", defaults.DEFAULT_ALPHA)),
            fsm_decay=DecayPolicy(getattr(args, "fsm_decay", defaults.DEFAULT_FSM_DECAY)),
            seed=int(getattr(args, "seed", defaults.DEFAULT_SEED)),
            models=parse_models(getattr(args, "models", defaults.DEFAULT_MODELS)),
            workers=int(getattr(args, "workers", defaults.DEFAULT_WORKERS)),
            score_tied_gold=bool(getattr(args, "score_tied_gold", False)),
            exact_mcnemar=bool(getattr(args, "exact_mcnemar", False)),
        )

    def echo(self) -> dict[str, Any]:
        # workers is left out: reports must not depend on how folds were scheduled
        return {
            "prior": {"name": self.prior_name, **self.prior.as_dict()},
            "u_prior": StatusDistribution.of(defaults.UNIFORM_PRIOR).as_dict(),
            "i_prior": StatusDistribution.of(defaults.INFORMED_PRIOR).as_dict(),
            "mode": self.mode.value,
            "alpha": self.alpha,
            "fsm_decay": self.fsm_decay.value,
            "seed": self.seed,
            "models": list(self.models),
            "score_tied_gold": self.score_tied_gold,
            "exact_mcnemar": self.exact_mcnemar,
        }
