# pyre-strict
"""Configuration models for encryption and denoising attacks."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

MaskMode = Literal["full", "band", "region"]


class EncryptConfig(BaseModel):
    """Settings for noise synthesis and polarity disruption."""

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=0.05, ge=0)  # timestamp scaling per unit of distance
    t_threshold: int | None = Field(default=None, ge=1)  # absolute T_t in µs, None = adaptive
    spatial_threshold: int = Field(default=1, ge=1)  # T_x, inclusive
    seed: int = Field(default=0, ge=0, lt=2**64)
    mask_mode: MaskMode = "full"
    band_radius: int = Field(default=1, ge=1)
    region: tuple[int, int, int, int] | None = None  # x0, y0, x1, y1 (end exclusive)
    audit: bool = False

    @model_validator(mode="after")  # pyre-fixme[56]
    def validate_region(self) -> "EncryptConfig":
        """Region mode needs a non-empty rectangle."""
        if self.mask_mode == "region":
            if self.region is None:
                raise ValueError("mask_mode 'region' requires region=(x0, y0, x1, y1)")
            x0, y0, x1, y1 = self.region
            if min(x0, y0) < 0 or x1 <= x0 or y1 <= y0:
                raise ValueError(f"region must satisfy 0 <= x0 < x1 and 0 <= y0 < y1, got {self.region}")
        return self


class NnfConfig(BaseModel):
    """Nearest-neighbor filter thresholds; both distances are strict."""

    model_config = ConfigDict(frozen=True)

    t_space: int = Field(default=2, ge=1)
    t_time: int = Field(default=5000, ge=1)
    min_neighbors: int = Field(default=1, ge=1)


class DensityConfig(BaseModel):
    """Voxel size (pixels, pixels, µs) and the occupancy needed to keep an event."""

    model_config = ConfigDict(frozen=True)

    dx: int = Field(default=2, ge=1)
    dy: int = Field(default=2, ge=1)
    dt: int = Field(default=10000, ge=1)
    min_count: int = Field(default=2, ge=1)
