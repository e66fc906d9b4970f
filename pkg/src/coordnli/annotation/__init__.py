from .journal import SessionError, SessionState, load_state, read_journal, replay
from .service import SessionStore, create_app

__all__ = [
    "SessionError",
    "SessionState",
    "SessionStore",
    "create_app",
    "load_state",
    "read_journal",
    "replay",
]
