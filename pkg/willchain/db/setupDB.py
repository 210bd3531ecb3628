from loguru import logger
from sqlalchemy.engine import Engine

from . import models
from .database import engine as default_engine


def setup_database(engine: Engine = default_engine) -> None:
    models.Base.metadata.create_all(bind=engine)
    logger.debug("database tables ready at {}", engine.url)


if __name__ == "__main__":
    setup_database()
