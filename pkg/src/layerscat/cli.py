"""Command-line entry point.

Exit codes: 0 success, 2 scene parse error, 3 validation error,
4 singular matrix, 5 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .errors import (
    GeometryError,
    SceneParseError,
    SceneValidationError,
    SeriesConvergenceError,
    SingularMatrixError,
)
from .exterior import Excitation
from .sceneio import RunConfig, parse_scene, write_diagnostics, write_rcs_csv
from .workflow import compute_rcs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_SINGULAR = 4
EXIT_IO = 5


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="layerscat",
        description=(
            "2D TM scattering from layered scatterers: surface-admittance "
            "recursion, dense two-trace reference, or analytic circular series."
        ),
    )
    p.add_argument("--scene", required=True, help="scene description file")
    p.add_argument("--freq", required=True, type=float, help="frequency in Hz")
    p.add_argument("--ppw", required=True, type=int,
                   help="mesh points per wavelength (finest adjacent medium)")
    p.add_argument("--formulation", required=True,
                   choices=("dsao", "pmchwt", "mie"))
    p.add_argument("--angles", type=int, default=360,
                   help="observation angles over [0, 360) degrees")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--diagnostics", default=None,
                   help="optional plain-text diagnostics report path")
    p.add_argument("--extension-d", type=float, default=None, metavar="METERS",
                   help="override the scene's fictitious-boundary distance")
    return p


def config_from_args(args) -> RunConfig:
    return RunConfig(
        scene_path=args.scene,
        freq=args.freq,
        ppw=args.ppw,
        formulation=args.formulation,
        out_path=args.out,
        angles=args.angles,
        diagnostics_path=args.diagnostics,
        extension_override=args.extension_d,
    )


def run(config: RunConfig) -> int:
    try:
        scene = parse_scene(config.scene_path)
    except OSError as exc:
        logger.error("cannot read scene: %s", exc)
        return EXIT_IO
    except SceneParseError as exc:
        logger.error("scene parse error: %s", exc)
        return EXIT_PARSE
    except (SceneValidationError, GeometryError) as exc:
        logger.error("scene validation error: %s", exc)
        return EXIT_VALIDATION

    if config.extension_override is not None:
        try:
            scene = dataclasses.replace(
                scene, extension_distance=config.extension_override
            )
        except (SceneValidationError, GeometryError) as exc:
            logger.error("invalid extension distance: %s", exc)
            return EXIT_VALIDATION

    try:
        result = compute_rcs(
            scene,
            config.freq,
            config.ppw,
            config.formulation,
            exc=Excitation(),
            n_angles=config.angles,
        )
    except SingularMatrixError as exc:
        logger.error("%s", exc)
        return EXIT_SINGULAR
    except (SceneValidationError, GeometryError, SeriesConvergenceError) as exc:
        logger.error("validation error: %s", exc)
        return EXIT_VALIDATION

    try:
        write_rcs_csv(result.curve, config.out_path)
        if config.diagnostics_path is not None:
            write_diagnostics(result.report, config.diagnostics_path)
    except OSError as exc:
        logger.error("cannot write output: %s", exc)
        return EXIT_IO
    logger.info("wrote %s", config.out_path)
    return EXIT_OK


def main(argv=None) -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except SceneValidationError as exc:
        logger.error("%s", exc)
        sys.exit(EXIT_VALIDATION)
    sys.exit(run(config))


if __name__ == "__main__":
    main()
