"""
Numerical tolerances and run limits, read from RMPC_* environment variables
or a .env file (e.g. RMPC_EPS_ACT=1e-7).

Routines fall back to these values when a caller passes no explicit override.
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    log_level: str = "INFO"

    # synthesis
    dare_tol: float = 1e-12
    dare_max_iter: int = 100_000
    terminal_max_steps: int = 500

    # LP / QP engines
    redundancy_tol: float = 1e-9
    lp_tol: float = 1e-10
    qp_feas_tol: float = 1e-10
    eps_act: float = 1e-8

    # regions
    rank_tol: float = 1e-10
    singular_tol: float = 1e-10
    projection_row_limit: int = 20_000
    projection_elim_cap: int = 16

    # closed loop and experiments
    conv_tol: float = 1e-2
    max_steps: int = 1000
    sampling_max_draws: int = 1_000_000
    sampling_min_acceptance: float = 1e-3
    workers: int = 1

    class Config:
        env_file = ".env"
        env_prefix = "RMPC_"


# shared by every module
settings = Settings()
