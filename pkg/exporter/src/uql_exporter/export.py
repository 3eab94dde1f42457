"""Export jobs: run a zoo model over an image folder, emit UQL1 / pool CSV."""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .dataset import FolderDataset
from .uql1 import KIND_LOGITS, atomic_write_text, write_uql1
from .zoo import load_model, num_classes

log = logging.getLogger(__name__)

DEFAULT_MIN_SAMPLES = 200
DEFAULT_EST_SIZE = 150
DEFAULT_TEST_SIZE = 50


@dataclass(frozen=True)
class ExportJob:
    model: str
    dataset: str
    output: str
    passes: int = 1
    batch_size: int = 64
    device: str = "cpu"
    seed: int = 0

    def __post_init__(self):
        if self.passes < 1:
            raise ValueError("passes must be >= 1")


def _enable_dropout(model: nn.Module):
    """Keep the model in eval mode but let dropout layers sample."""
    for module in model.modules():
        if isinstance(module, nn.Dropout):
            module.train()


def run_inference(job: ExportJob):
    """Forward the dataset; returns (labels (n,), logits (n, T, k))."""
    model = load_model(job.model).to(job.device)
    k = num_classes(job.model)
    data = FolderDataset(job.dataset)
    if data.num_classes > k:
        raise ValueError(
            f"dataset has {data.num_classes} classes but model "
            f"{job.model!r} outputs {k}"
        )
    if job.passes > 1:
        _enable_dropout(model)
    torch.manual_seed(job.seed)

    all_labels, all_logits = [], []
    with torch.no_grad():
        for labels, images in data.batches(job.batch_size):
            images = images.to(job.device)
            passes = torch.stack(
                [model(images) for _ in range(job.passes)], dim=1
            )
            all_labels.append(labels.numpy())
            all_logits.append(passes.cpu().numpy())
    return np.concatenate(all_labels), np.concatenate(all_logits), data


def export_log(job: ExportJob) -> str:
    labels, logits, _ = run_inference(job)
    write_uql1(job.output, KIND_LOGITS, logits.shape[-1], labels, logits)
    log.info("wrote %s: n=%d T=%d k=%d", job.output, len(labels),
             job.passes, logits.shape[-1])
    return job.output


def softmax_response(logits: np.ndarray) -> np.ndarray:
    """Framework-side kappa: max softmax probability per row."""
    z = torch.from_numpy(np.asarray(logits, dtype=np.float64))
    return torch.softmax(z, dim=-1).max(dim=-1).values.numpy()


def export_pool(job: ExportJob, manifest=None,
                min_samples: int = DEFAULT_MIN_SAMPLES,
                est_size: int = DEFAULT_EST_SIZE,
                test_size: int = DEFAULT_TEST_SIZE) -> str:
    """Per-class pool table: one row per sample, split assigned by seed.

    ``manifest`` optionally restricts to a list of class names. Classes with
    fewer than ``min_samples`` images are skipped with a warning; survivors
    are subsampled to est_size + test_size.
    """
    labels, logits, data = run_inference(job)
    if job.passes != 1:
        raise ValueError("pool export expects a single-pass job")
    scores = softmax_response(logits[:, 0, :])

    wanted = data.class_names if manifest is None else list(manifest)
    rng = np.random.default_rng(job.seed)
    rows_by_class = data.by_class()
    lines = ["class_id,split,score"]
    kept = 0
    for name in sorted(wanted):
        rows = rows_by_class.get(name, [])
        if len(rows) < min_samples:
            warnings.warn(
                f"class {name!r}: {len(rows)} samples < minimum "
                f"{min_samples}, skipped"
            )
            continue
        picked = np.sort(rng.choice(rows, size=est_size + test_size,
                                    replace=False))
        order = rng.permutation(est_size + test_size)
        for j, row in enumerate(picked[order]):
            split = "est" if j < est_size else "test"
            lines.append(f"{name},{split},{float(scores[row])!r}")
        kept += 1
    if kept == 0:
        raise ValueError("no class met the minimum sample count")
    atomic_write_text(job.output, "\n".join(lines) + "\n")
    return job.output
