"""Image-folder dataset: one subdirectory per class, files sorted by path.

Row index is instance identity in the exported log, so iteration order is
pinned to sorted relative paths for reproducibility across machines.
"""

from pathlib import Path

import numpy as np
import torch
from PIL import Image

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp", ".gif"}


class FolderDataset:
    def __init__(self, root, image_size: int = 8):
        self.root = Path(root)
        if not self.root.is_dir():
            raise FileNotFoundError(f"dataset root {self.root} is not a directory")
        self.image_size = image_size
        self.class_names = sorted(
            d.name for d in self.root.iterdir() if d.is_dir()
        )
        if not self.class_names:
            raise ValueError(f"no class subdirectories under {self.root}")
        class_index = {name: i for i, name in enumerate(self.class_names)}
        self.samples = sorted(
            (path, class_index[path.parent.name])
            for name in self.class_names
            for path in (self.root / name).iterdir()
            if path.suffix.lower() in IMAGE_EXTENSIONS
        )

    def __len__(self):
        return len(self.samples)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def by_class(self):
        """{class name: [row indices]} in iteration order."""
        out = {name: [] for name in self.class_names}
        for row, (_, label) in enumerate(self.samples):
            out[self.class_names[label]].append(row)
        return out

    def load_tensor(self, path) -> torch.Tensor:
        with Image.open(path) as img:
            img = img.convert("RGB").resize((self.image_size, self.image_size))
            array = np.asarray(img, dtype=np.float32) / 255.0
        return torch.from_numpy(array).permute(2, 0, 1)

    def batches(self, batch_size: int):
        """Yield (labels, images) tensors in dataset order."""
        for start in range(0, len(self.samples), batch_size):
            chunk = self.samples[start:start + batch_size]
            images = torch.stack([self.load_tensor(p) for p, _ in chunk])
            labels = torch.tensor([label for _, label in chunk])
            yield labels, images
