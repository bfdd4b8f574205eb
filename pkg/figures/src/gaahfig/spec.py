"""Figure specifications: what to read, which kind of plot, where to write."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

KINDS = ("phase-map", "lightcone", "pe-series", "path-cut", "sweep-plane",
         "scaling")

# columns each kind insists on before touching the data
REQUIRED_COLUMNS = {
    "phase-map": ("mu", "V", "mean_neg_ln_ipr"),
    "lightcone": ("t_ns", "observable", "index", "mean"),
    "pe-series": ("t_ns", "observable", "index", "mean", "stderr"),
    "path-cut": ("mu", "V", "q", "mean", "stderr"),
    "sweep-plane": ("mu", "V", "mean"),
}


@dataclass
class FigureSpec:
    kind: str
    inputs: List[str]
    output: str
    title: Optional[str] = None
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    xlim: Optional[Tuple[float, float]] = None
    ylim: Optional[Tuple[float, float]] = None
    clim: Optional[Tuple[float, float]] = None
    labels: Optional[Sequence[str]] = None
    cmap: str = "viridis"
    figsize: Tuple[float, float] = (6.0, 4.0)
    dpi: int = 150
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; choose from: "
                + ", ".join(KINDS))
        if not self.inputs:
            raise ValueError("spec needs at least one input file")
        suffix = Path(self.output).suffix.lower()
        if suffix not in (".png", ".svg", ".pdf"):
            raise ValueError(
                f"output must end in .png, .svg, or .pdf, got {suffix!r}")
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs")
        for name in ("xlim", "ylim", "clim"):
            v = getattr(self, name)
            if v is not None:
                lo, hi = float(v[0]), float(v[1])
                if not lo < hi:
                    raise ValueError(f"{name} must be (lo, hi), got {v}")
                setattr(self, name, (lo, hi))
        self.figsize = (float(self.figsize[0]), float(self.figsize[1]))
        self.dpi = int(self.dpi)


_FIELDS = ("kind", "inputs", "output", "title", "xlabel", "ylabel", "xlim",
           "ylim", "clim", "labels", "cmap", "figsize", "dpi")


def load_spec(path):
    """Read a FigureSpec from JSON, resolving input paths beside the file."""
    path = Path(path)
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})")
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: spec must be a JSON object")
    for key in ("kind", "inputs", "output"):
        if key not in raw:
            raise ValueError(f"{path}: spec field '{key}' is required")
    unknown = sorted(set(raw) - set(_FIELDS))
    if unknown:
        raise ValueError(f"{path}: unknown spec fields: {', '.join(unknown)}")
    kwargs = {k: raw[k] for k in _FIELDS if k in raw}
    base = path.parent
    kwargs["inputs"] = [str((base / p)) if not Path(p).is_absolute() else p
                        for p in raw["inputs"]]
    out = raw["output"]
    kwargs["output"] = str(base / out) if not Path(out).is_absolute() else out
    return FigureSpec(**kwargs)
