from .dataset import FolderDataset
from .export import ExportJob, export_log, export_pool, softmax_response
from .uql1 import KIND_LOGITS, KIND_PROBS, KIND_SCORE, write_uql1
from .zoo import ModelNotFoundError, list_models, load_model

__version__ = "0.1.0"

__all__ = [
    "ExportJob",
    "FolderDataset",
    "KIND_LOGITS",
    "KIND_PROBS",
    "KIND_SCORE",
    "ModelNotFoundError",
    "export_log",
    "export_pool",
    "list_models",
    "load_model",
    "softmax_response",
    "write_uql1",
    "__version__",
]
