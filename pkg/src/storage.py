import csv
import logging
from pathlib import Path
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from errors import GridError, StorageError
from models.grid import GridWave
from models.trajectory import OPTIONAL_SERIES, TrajectoryRecord

# Configure logging
logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
CSV_HEADER = ('t', 'norm', 'mean_x', 'lobe_x', 'width', 'env_L', 'env_xc')
PGM_MAXVAL = 65535


def init_output_dir(path: PathLike) -> Path:
    """Create the artifact directory with proper error handling"""
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"❌ Error creating output directory {directory}: {e}")
        raise StorageError(f"cannot create output directory {directory}: {e}") from e
    logger.debug(f"output directory ready: {directory}")
    return directory


def _number(value: float) -> str:
    # repr keeps full double precision and round-trips exactly
    return repr(float(value))


def write_trajectory_csv(rec: TrajectoryRecord, path: PathLike) -> Path:
    target = Path(path)
    rows = []
    for i in range(len(rec)):
        row = [_number(rec.times[i]), _number(rec.norm[i]), _number(rec.mean_x[i]),
               _number(rec.lobe_x[i]), _number(rec.width[i])]
        for name in OPTIONAL_SERIES:
            series = getattr(rec, name)
            row.append(_number(series[i]) if series is not None else '')
        rows.append(row)
    try:
        with target.open('w', newline='', encoding='ascii') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    except OSError as e:
        raise StorageError(f"cannot write trajectory CSV {target}: {e}") from e
    logger.info(f"💾 trajectory CSV written: {target} ({len(rows)} rows)")
    return target


def write_profile_csv(x: np.ndarray, columns: Dict[str, np.ndarray], path: PathLike) -> Path:
    """x plus one intensity column per entry of columns"""
    target = Path(path)
    names = list(columns)
    try:
        with target.open('w', newline='', encoding='ascii') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(['x'] + names)
            for j, xj in enumerate(x):
                writer.writerow([_number(xj)] + [_number(columns[name][j]) for name in names])
    except OSError as e:
        raise StorageError(f"cannot write profile CSV {target}: {e}") from e
    logger.info(f"💾 profile CSV written: {target}")
    return target


def density_pixels(snapshots: Sequence[Tuple[float, GridWave]]) -> np.ndarray:
    """|psi|^2 rows scaled to the global maximum, as 16-bit gray levels"""
    if len(snapshots) < 2:
        raise GridError(f"a density image needs at least 2 snapshots, got {len(snapshots)}")
    density = np.vstack([wave.density for _, wave in snapshots])
    peak = float(np.max(density))
    scaled = density / peak if peak > 0 else density
    return np.rint(scaled * PGM_MAXVAL).astype('>u2')


def write_density_image(snapshots: Sequence[Tuple[float, GridWave]], path: PathLike) -> Path:
    """Binary 16-bit PGM: rows are times (first snapshot on top), columns are x"""
    pixels = density_pixels(snapshots)
    height, width = pixels.shape
    target = Path(path)
    try:
        with target.open('wb') as handle:
            handle.write(f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode('ascii'))
            handle.write(pixels.tobytes())
    except OSError as e:
        raise StorageError(f"cannot write density image {target}: {e}") from e
    logger.info(f"💾 density image written: {target} ({width}x{height})")
    return target
