import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")


def parser(description: str, out_default: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default=f"results/{out_default}", help="output directory")
    return p


def outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
