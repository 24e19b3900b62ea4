"""
Matrix Market dumps of symmetric matrices (debugging aid)
"""

import logging
from pathlib import Path
from typing import Union

import scipy.io
import scipy.sparse as sp

from .matrix import SparseSymMatrix

logger = logging.getLogger(__name__)


def dump_matrix(A: SparseSymMatrix, path: Union[str, Path]) -> Path:
    """Write the lower triangle in Matrix Market coordinate format with 17 significant digits"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scipy.io.mmwrite(str(path), sp.coo_matrix(A.lower_scipy()), precision=17, symmetry="symmetric")
    written = path if path.suffix == ".mtx" else path.with_name(path.name + ".mtx")
    logger.debug(f"Wrote {A.n}x{A.n} matrix with {A.nnz} entries to {written}")
    return written


def load_matrix(path: Union[str, Path]) -> SparseSymMatrix:
    return SparseSymMatrix.from_scipy(sp.coo_matrix(scipy.io.mmread(str(path))))
