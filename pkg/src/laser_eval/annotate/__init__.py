from .store import AnnotationStore, StaleTask, TaskPairView, ValidationFailure
from .server import create_app, find_ui_dir

__all__ = [
    "AnnotationStore",
    "StaleTask",
    "TaskPairView",
    "ValidationFailure",
    "create_app",
    "find_ui_dir",
]
