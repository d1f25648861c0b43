"""Pipeline parameters and their defaults.

Every tunable the recognition pipeline exposes lives here so the CLI, the
evaluation harness and the library functions agree on one set of defaults.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

# Short-time analysis.
DEFAULT_SAMPLE_RATE = 16000
DEFAULT_DURATION_S = 1.0
DEFAULT_FRAME_MS = 25.0
DEFAULT_HOP_MS = 10.0
DEFAULT_WINDOW = "hamming"

# Mel filterbank and cepstrum.
DEFAULT_NUM_FILTERS = 26
NUM_COEFFS = 13
DEFAULT_LOG_BASE = 10.0
DEFAULT_ENERGY_FLOOR = 1e-10
DEFAULT_SKIP_C0 = False
DEFAULT_F_LOW = 0.0

# Voiceprints and decisions.
DEFAULT_SIGMA_FLOOR = 1e-6
DEFAULT_BAND_C = 1.0
DEFAULT_TAU = 0.0
EK_MODES = ("literal", "sigma-free")
DEFAULT_EK_MODE = "literal"

# Evaluation harness.
DEFAULT_SEED = 0
DEFAULT_ENROLLMENT_SIZE = 8
DEFAULT_SENTENCES_PER_SPEAKER = 10
DEFAULT_SAME_TEXT_PAIRS = 1

WINDOWS = ("rectangular", "hamming")


@dataclass(frozen=True)
class Config:
    """Immutable bundle of every pipeline parameter.

    ``f_high`` of ``None`` means the Nyquist frequency of whatever waveform
    is being analysed.
    """

    frame_ms: float = DEFAULT_FRAME_MS
    hop_ms: float = DEFAULT_HOP_MS
    num_filters: int = DEFAULT_NUM_FILTERS
    window: str = DEFAULT_WINDOW
    log_base: float = DEFAULT_LOG_BASE
    energy_floor: float = DEFAULT_ENERGY_FLOOR
    skip_c0: bool = DEFAULT_SKIP_C0
    f_low: float = DEFAULT_F_LOW
    f_high: float | None = None
    sigma_floor: float = DEFAULT_SIGMA_FLOOR
    band_c: float = DEFAULT_BAND_C
    tau: float = DEFAULT_TAU
    ek_mode: str = DEFAULT_EK_MODE
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        from .errors import ValidationError

        problems = []
        if not self.hop_ms > 0:
            problems.append(f"hop_ms must be positive, got {self.hop_ms}")
        if not self.frame_ms >= self.hop_ms:
            problems.append(f"frame_ms ({self.frame_ms}) must be >= hop_ms ({self.hop_ms})")
        if self.num_filters < NUM_COEFFS + int(self.skip_c0):
            problems.append(f"num_filters must be >= {NUM_COEFFS + int(self.skip_c0)}, got {self.num_filters}")
        if self.window not in WINDOWS:
            problems.append(f"window must be one of {WINDOWS}, got {self.window!r}")
        if not (self.log_base > 0 and self.log_base != 1):
            problems.append(f"log_base must be positive and != 1, got {self.log_base}")
        if not self.energy_floor > 0:
            problems.append(f"energy_floor must be positive, got {self.energy_floor}")
        if not self.sigma_floor > 0:
            problems.append(f"sigma_floor must be positive, got {self.sigma_floor}")
        if not self.band_c >= 0:
            problems.append(f"band_c must be >= 0, got {self.band_c}")
        if not self.tau >= 0:
            problems.append(f"tau must be >= 0, got {self.tau}")
        if self.ek_mode not in EK_MODES:
            problems.append(f"ek_mode must be one of {EK_MODES}, got {self.ek_mode!r}")
        if self.f_low < 0:
            problems.append(f"f_low must be >= 0, got {self.f_low}")
        if problems:
            raise ValidationError("; ".join(problems))

    def with_overrides(self, **changes) -> "Config":
        """Copy with the given fields replaced; ``None`` values are ignored."""
        known = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in changes.items() if k in known and v is not None})

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = Config()
