"""Interviewer and respondent state machines for the classical CRRT protocols."""

from .adversaries import ADVERSARIES, respondent_class
from .coin import AuditRecord, p2_audit, p2_respondent_equivalence_args
from .config import PROTOCOL_IDS, VARIANTS, ConfigError, PollConfig
from .ot_based import iq_respondent_prepare, p1_respondent_prepare
from .sessions import SessionResult, bd_run, iq_run, p1_run, p1_weak_run, p2_run, p2_weak_run, reverify, run
from .wire import Halt, ProtocolMessage, SessionTranscript, read_transcripts, run_session

__all__ = [
    "ADVERSARIES", "PROTOCOL_IDS", "VARIANTS", "AuditRecord", "ConfigError", "Halt", "PollConfig",
    "ProtocolMessage", "SessionResult", "SessionTranscript", "bd_run", "iq_respondent_prepare", "iq_run",
    "p1_respondent_prepare", "p1_run", "p1_weak_run", "p2_audit", "p2_respondent_equivalence_args",
    "p2_run", "p2_weak_run", "read_transcripts", "respondent_class", "reverify", "run", "run_session",
]
