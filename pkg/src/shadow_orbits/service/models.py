"""Request/response models of the computation service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from ..rings import is_prime

Status = Literal["ok", "mismatch", "infeasible"]


class VerifyRequest(BaseModel):
    target: Literal["thmA", "thmB", "thmD", "exp", "shadows"]
    algebra: Literal["sl2", "sl3", "gl2", "gl3"] = "sl2"
    p: int = 5
    r: int = Field(default=1, ge=1)
    samples: int = Field(default=1000, ge=1)
    seed: int = 0
    threads: Optional[int] = Field(default=None, ge=1)
    bound: int = Field(default=10**7, gt=0)

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not is_prime(v) or v == 2:
            raise ValueError("p must be an odd prime")
        return v

    @model_validator(mode="after")
    def _compatible(self):
        if self.algebra in ("sl3", "gl3") and self.p == 3:
            raise ValueError("p = 3 is excluded for the 3x3 algebras")
        return self


class TableRequest(BaseModel):
    q: int = 5
    oracle: bool = True
    threads: Optional[int] = Field(default=None, ge=1)

    @field_validator("q")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError("q must be prime")
        if v in (2, 3):
            raise ValueError("q must exceed 3")
        return v


class ZetaRequest(BaseModel):
    algebra: Literal["sl2", "sl3"] = "sl3"
    q: Optional[int] = None
    p: Optional[int] = None
    m: int = Field(default=1, ge=1)
    terms: int = Field(default=6, ge=1, le=32)
    estimate: bool = False
    seed: int = 0
    threads: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _fill(self):
        if self.algebra == "sl3":
            q = self.q if self.q is not None else (self.p if self.p is not None else 5)
            if not is_prime(q) or q in (2, 3):
                raise ValueError("sl3 zeta needs a prime q > 3")
            self.q = q
        else:
            p = self.p if self.p is not None else (self.q if self.q is not None else 5)
            if p not in (3, 5, 7):
                raise ValueError("sl2 zeta runs at p in {3, 5, 7}")
            self.p = p
        return self


class ShadowRequest(BaseModel):
    algebra: Literal["sl2", "sl3"] = "sl3"
    p: int = 5
    r: int = Field(default=1, ge=1)
    element: list[list[int]]
    strategy: Literal["oracle", "recursive"] = "oracle"

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not is_prime(v) or v == 2:
            raise ValueError("p must be an odd prime")
        return v

    @model_validator(mode="after")
    def _square(self):
        n = 2 if self.algebra == "sl2" else 3
        if len(self.element) != n or any(len(row) != n for row in self.element):
            raise ValueError(f"element must be a {n}x{n} integer matrix")
        if self.algebra == "sl3" and self.p == 3:
            raise ValueError("p = 3 is excluded for sl3")
        return self


class Report(BaseModel):
    status: Status
    report: dict
    message: str = ""


class Health(BaseModel):
    status: Literal["ok"]
    service: str
    version: str
