"""Shared helpers for the gallery scripts: optional plotting and an output folder."""
import os
from pathlib import Path

FIGURES = Path(os.environ.get("WVASIM_GALLERY_OUT", Path(__file__).with_name("figures")))


def pyplot():
    """Return matplotlib.pyplot with a file backend, or None when not installed."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping figures (pip install wvasim[plot])")
        return None
    return plt


def save(fig, name):
    FIGURES.mkdir(parents=True, exist_ok=True)
    path = FIGURES / name
    fig.savefig(path, dpi=130, bbox_inches="tight")
    print(f"wrote {path}")
