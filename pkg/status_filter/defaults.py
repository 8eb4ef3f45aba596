UNIFORM_PRIOR: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
INFORMED_PRIOR: tuple[float, float, float] = (0.05, 0.10, 0.85)

DEFAULT_PRIOR: str = "uniform"
DEFAULT_MODE: str = "soft"
DEFAULT_ALPHA: float = 0.0
DEFAULT_FSM_DECAY: str = "decay-one"
DEFAULT_SEED: int = 0
DEFAULT_MODELS: tuple[str, ...] = ("u", "i", "fsm", "rb")
DEFAULT_WORKERS: int = 1

SUM_TOLERANCE: float = 1e-9
READ_ROW_TOLERANCE: float = 1e-6

FORMAT_VERSION: int = 1
P_DISPLAY_FLOOR: float = 1e-4
RNG_ALGORITHM: str = "numpy.PCG64"
