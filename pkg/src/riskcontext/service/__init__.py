from .jobs import JOB_KINDS, JobQueue, JobRecord
from .storage import Snapshot, Workspace, dump_json

__all__ = [
    "JOB_KINDS",
    "JobQueue",
    "JobRecord",
    "Snapshot",
    "Workspace",
    "create_app",
    "dump_json",
]


def __getattr__(name):
    # create_app pulls in the pipeline; loading it lazily keeps
    # pipeline -> storage imports cycle-free.
    if name == "create_app":
        from .app import create_app

        return create_app
    raise AttributeError(name)
