from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    SEED: int = 0
    DATABASE_URL: str = "sqlite:///./willchain.db"
    LOG_LEVEL: str = "WARNING"
    LOG_JSON: bool = False

    NATIVE_DENOM: str = "uwill"
    PENALTY_AMOUNT: int = 1_000_000
    CHECKIN_PERIOD: int = 100
    CLAIM_WINDOW: int = 100
    TX_FEE: int = 1_000

    CHUNK_SIZE: int = 1024
    MAX_CHUNK_SIZE: int = 4096
    CELL_CAPACITY: int = 64

    REPORT_TIMESTAMPS: bool = False

    model_config = SettingsConfigDict(env_prefix="WILLCHAIN_", env_file=".env", extra="ignore")


settings = Settings()
