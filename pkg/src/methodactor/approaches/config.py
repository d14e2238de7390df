from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

from ..guess_logic import DIVERSITY_POLICIES


class ApproachId(str, enum.Enum):
    VANILLA = "vanilla"
    COT = "cot"
    COT_SCRIPTED = "cot_scripted"
    ACTOR = "actor"
    ACTOR2 = "actor2"
    ONESHOT = "oneshot"
    VANILLA_O1 = "vanilla_o1"
    ACTOR_O1 = "actor_o1"

    @classmethod
    def parse(cls, name: str | ApproachId) -> ApproachId:
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"oneshot_o1": "oneshot", "cot_script": "cot_scripted", "actor_2": "actor2"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            names = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown approach {name!r} (expected one of {names})") from None


REASONING_APPROACHES = frozenset({ApproachId.ONESHOT, ApproachId.VANILLA_O1, ApproachId.ACTOR_O1})


def default_model(approach: ApproachId) -> str:
    return "o1-preview" if approach in REASONING_APPROACHES else "gpt-4o"


@dataclass(frozen=True)
class ApproachConfig:
    approach: ApproachId
    model_id: str = ""
    stockpile_threshold: int = 5
    reduced_threshold: int = 3
    # correct submissions after which reduced_threshold applies
    reduce_after_correct: int = 2
    brainstorm_calls: int = 5
    restart_cap: int = 20
    # hard bound on pipeline cycles between two submissions
    cycle_cap: int = 200
    mole_count: int = 2
    moles_after_incorrect: int = 2
    triplet_after: int = 13
    pair_after: int = 15
    diversity: str = "alternate"
    diversity_floor: int = 8
    rng_seed: int = 0
    temperature: float | None = None
    max_output_tokens: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "approach", ApproachId.parse(self.approach))
        if not self.model_id:
            object.__setattr__(self, "model_id", default_model(self.approach))
        for name in ("stockpile_threshold", "reduced_threshold", "restart_cap", "cycle_cap",
                     "brainstorm_calls", "triplet_after", "pair_after"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.mole_count < 0:
            raise ValueError("mole_count must be >= 0")
        if self.diversity not in DIVERSITY_POLICIES:
            raise ValueError(f"diversity must be one of {DIVERSITY_POLICIES}")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["approach"] = self.approach.value
        return d

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ApproachConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown approach config key(s): {sorted(unknown)}")
        return cls(**dict(data))

    def with_(self, **changes: Any) -> ApproachConfig:
        return replace(self, **changes)
