"""
Raw file I/O: problem files, pydantic JSON documents, CSV tables and the npz
archive of a condensed QP.

No run-directory layout lives here; see run_repository.py.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, Sequence, Type, TypeVar

import numpy as np
from models import ConstraintKind, ProblemSpec, RowTag
from pydantic import BaseModel
from synthesis.condensing import CondensedQP, Plant
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

_QP_ARRAYS = ("H", "F", "Y", "G", "w", "E", "S", "P", "K_lqr")
_PLANT_ARRAYS = ("A", "B", "x_lower", "x_upper", "u_lower", "u_upper")


def read_problem(path: Path) -> ProblemSpec:
    """Parse and validate a problem file; raises pydantic.ValidationError on bad content."""
    return ProblemSpec.model_validate_json(Path(path).read_text())


def write_problem(path: Path, spec: ProblemSpec) -> None:
    write_model(path, spec, by_alias=True)


def write_model(path: Path, model: BaseModel, *, by_alias: bool = False) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2, by_alias=by_alias) + "\n")


def read_model(path: Path, model_cls: Type[ModelT]) -> ModelT:
    return model_cls.model_validate_json(Path(path).read_text())


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        return header, list(reader)


def save_qp(path: Path, qp: CondensedQP) -> None:
    """All CondensedQP matrices, the terminal set, the plant and the row tags in one npz."""
    plant = qp.plant
    arrays = {name: getattr(qp, name) for name in _QP_ARRAYS}
    arrays.update({f"plant_{name}": getattr(plant, name) for name in _PLANT_ARRAYS})
    arrays["terminal_T"] = qp.terminal_set.T
    arrays["terminal_d"] = qp.terminal_set.d
    arrays["horizon"] = np.array(qp.horizon)
    arrays["tag_stage"] = np.array([tag.stage for tag in qp.row_tags], dtype=int)
    arrays["tag_kind"] = np.array([tag.kind.value for tag in qp.row_tags])
    arrays["tag_component"] = np.array([tag.component for tag in qp.row_tags], dtype=int)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, **arrays)
    logger.debug("Saved condensed QP to %s", path)


def load_qp(path: Path) -> CondensedQP:
    with np.load(Path(path), allow_pickle=False) as archive:
        plant = Plant(*(archive[f"plant_{name}"] for name in _PLANT_ARRAYS))
        tags = tuple(
            RowTag(stage=int(stage), kind=ConstraintKind(str(kind)), component=int(component))
            for stage, kind, component in zip(
                archive["tag_stage"], archive["tag_kind"], archive["tag_component"]
            )
        )
        return CondensedQP(
            **{name: archive[name] for name in _QP_ARRAYS},
            terminal_set=Polytope(archive["terminal_T"], archive["terminal_d"]),
            row_tags=tags,
            plant=plant,
            horizon=int(archive["horizon"]),
        )
