import datetime

from sqlalchemy import Column, DateTime, String, Text

from .database import Base


class Snapshot(Base):
    __tablename__ = "snapshots"
    name = Column(String, primary_key=True)
    state_hash = Column(String, nullable=False)
    payload = Column(Text, nullable=False)
    created_at = Column(DateTime, default=datetime.datetime.now)


class World(Base):
    """The working simulation the CLI resumes between invocations."""

    __tablename__ = "worlds"
    name = Column(String, primary_key=True)
    payload = Column(Text, nullable=False)
    updated_at = Column(DateTime, default=datetime.datetime.now, onupdate=datetime.datetime.now)
