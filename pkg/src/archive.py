from datetime import datetime, timezone
import os
from typing import List, Optional

from sqlalchemy import Column, DateTime, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from src.config import ARCHIVE_DB_NAME, ARCHIVE_HOME

Base = declarative_base()


def _now() -> datetime:
    return datetime.now(timezone.utc)


class Run(Base):
    __tablename__ = 'runs'
    id = Column(Integer, primary_key=True)
    command = Column(String(255), nullable=False)
    created_at = Column(DateTime, default=_now)
    overall = Column(String(20), nullable=False)
    degree_bound = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    report = Column(Text, nullable=False)


class RunArchive:
    """Local SQLite archive of JSON reports"""

    def __init__(self, home: str = ARCHIVE_HOME, db_name: str = ARCHIVE_DB_NAME):
        os.makedirs(home, exist_ok=True)
        self.db_path = os.path.join(home, db_name)
        self.engine = create_engine(f'sqlite:///{self.db_path}')
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(bind=self.engine)

    def get_session(self):
        return self.Session()

    def record(self, command: str, overall: str, degree_bound: int, seed: int, report: str) -> int:
        session = self.get_session()
        try:
            run = Run(command=command, overall=overall, degree_bound=degree_bound, seed=seed, report=report)
            session.add(run)
            session.commit()
            return run.id
        finally:
            session.close()

    def recent(self, limit: int = 20) -> List[Run]:
        session = self.get_session()
        try:
            return session.query(Run).order_by(Run.id.desc()).limit(limit).all()
        finally:
            session.close()

    def get(self, run_id: int) -> Optional[Run]:
        session = self.get_session()
        try:
            return session.query(Run).filter_by(id=run_id).first()
        finally:
            session.close()

    def delete(self, run_id: int) -> bool:
        session = self.get_session()
        try:
            run = session.query(Run).filter_by(id=run_id).first()
            if not run:
                return False
            session.delete(run)
            session.commit()
            return True
        finally:
            session.close()
