# Subcommands of the gifsolve command line

import logging
import time
from argparse import Namespace
from pathlib import Path
from typing import Optional

import numpy as np

import gifsolve
from gifsolve.chaos import (
    ObservableRegistry,
    OrbitConfig,
    empirical_measure,
    ergodic_average,
    orbit_diagnostics,
)
from gifsolve.concurrent.orbits import OrbitRunner
from gifsolve.decorator import argument, command, help
from gifsolve.errors import BudgetExceededError, InvalidInputError
from gifsolve.gifs import (
    approximate_attractor,
    classical_gifs_iterate,
    diagonal_fixed_point,
    posterior_bound,
)
from gifsolve.ifs import default_delta
from gifsolve.io import (
    read_measure_csv,
    read_pointset_csv,
    render_pointset,
    write_ledger_csv,
    write_measure_csv,
    write_pgm,
    write_pointset_csv,
    write_reports_csv,
)
from gifsolve.ledger import ConvergenceReport
from gifsolve.manifest import RunManifest, outputs_of, sha256_of
from gifsolve.measure import DiscreteMeasure, JointResult, joint_iterate, mk_distance
from gifsolve.metric import PointSet, hausdorff
from gifsolve.options import get_config
from gifsolve.spec import SystemSpec, parse_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 2

_OBSERVABLE_NAMES = ", ".join(ObservableRegistry.get_instance().names)


def _load(path: str) -> tuple[SystemSpec, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"Can not read spec {path}.") from e
    return parse_spec(text), sha256_of(text.encode("utf-8"))


def _write_manifest(
    namespace: Namespace,
    out_dir: Path,
    started: float,
    outputs: list[str],
    bounds: dict[str, float],
    spec_hash: Optional[str] = None,
    seeds: Optional[dict[str, int]] = None,
) -> None:
    config = get_config()
    manifest = RunManifest(
        command=list(getattr(namespace, "argv", [])),
        spec_hash=spec_hash,
        schedules=config.schedules,
        seeds=seeds or {},
        tolerances=config.tolerances,
        outputs=outputs_of(out_dir, outputs),
        bounds=bounds,
        wall_clock=time.perf_counter() - started,
        version=gifsolve.__version__,
    )
    path = manifest.write(out_dir)
    logger.info("manifest written to %s", path)


def _write_partial(
    namespace: Namespace,
    out_dir: Path,
    started: float,
    error: BudgetExceededError,
    spec_hash: str,
) -> int:
    # A budget hit before any step completed: keep the last iterate, no bound.
    if error.partial is None:
        raise error
    logger.warning("Writing the last iterate without a bound: %s", error)
    if isinstance(error.partial, tuple):
        attractor, measure = error.partial
        write_measure_csv(out_dir / "measure.csv", measure)
        outputs = ["attractor.csv", "measure.csv"]
    else:
        attractor = error.partial
        outputs = ["attractor.csv"]
    write_pointset_csv(out_dir / "attractor.csv", attractor)
    _write_manifest(namespace, out_dir, started, outputs, {}, spec_hash)
    print(f"note: {error}")
    print(f"points: {len(attractor)}")
    print("certified bound: none")
    return EXIT_PARTIAL


@command("validate")
@argument("spec", help="system spec (JSON)")
@help("Parse and validate a system spec.")
def validate(namespace: Namespace) -> int:
    spec, _ = _load(namespace.spec)
    system = spec.to_system()
    print(
        f"valid: {len(system)} maps, order {system.order}, dim {system.dim}, "
        f"Lip(F_S) = {system.lip_fs!r}"
    )
    return EXIT_OK


@command("attractor-classical")
@argument("spec", help="system spec (JSON)")
@argument("--steps", type=int, default=None, help="number of terms (default: K)")
@argument("--delta", type=float, default=None, help="pruning grid spacing")
@help("Approximate the attractor by the m-term recursion.")
def attractor_classical(namespace: Namespace) -> int:
    started = time.perf_counter()
    config = get_config()
    spec, spec_hash = _load(namespace.spec)
    system = spec.to_system()
    budget = config.budget

    steps = namespace.steps if namespace.steps is not None else config.K
    delta = namespace.delta
    if delta is None:
        delta = default_delta(config.tol, system.lip_fs, system.dim)
    seed = PointSet([diagonal_fixed_point(system)])
    out_dir: Path = config.out_dir

    try:
        result = classical_gifs_iterate(
            system, [seed] * system.order, steps, delta, budget
        )
    except BudgetExceededError as e:
        return _write_partial(namespace, out_dir, started, e, spec_hash)
    bound: Optional[float]
    try:
        bound = posterior_bound(system, result, delta, budget)
    except BudgetExceededError as e:
        logger.warning("No certificate for the last term: %s", e)
        bound = None

    write_pointset_csv(out_dir / "attractor.csv", result)
    bounds: dict[str, float] = {} if bound is None else {"attractor": bound}
    _write_manifest(namespace, out_dir, started, ["attractor.csv"], bounds, spec_hash)
    print(f"points: {len(result)}")
    if bound is None:
        print("certified bound: none")
        return EXIT_PARTIAL
    print(f"certified bound: {bound!r}")
    return EXIT_OK


@command("attractor-evmap")
@argument("spec", help="system spec (JSON)")
@help("Approximate the attractor by iterating the evaluation map.")
def attractor_evmap(namespace: Namespace) -> int:
    started = time.perf_counter()
    config = get_config()
    spec, spec_hash = _load(namespace.spec)
    system = spec.to_system()

    b0 = PointSet([diagonal_fixed_point(system)])
    out_dir: Path = config.out_dir
    reports: list[ConvergenceReport] = []
    try:
        result, ledger = approximate_attractor(
            system,
            b0,
            config.beta_schedule,
            config.sigma_schedule,
            config.K,
            config.budget,
            reports=reports,
        )
    except BudgetExceededError as e:
        return _write_partial(namespace, out_dir, started, e, spec_hash)

    write_pointset_csv(out_dir / "attractor.csv", result)
    write_ledger_csv(out_dir / "ledger.csv", ledger)
    write_reports_csv(out_dir / "inner_reports.csv", reports)
    _write_manifest(
        namespace,
        out_dir,
        started,
        ["attractor.csv", "ledger.csv", "inner_reports.csv"],
        {"attractor": ledger.final_bound},
        spec_hash,
    )
    for note in ledger.notes:
        print(f"note: {note}")
    print(f"points: {len(result)}")
    print(f"certified bound: {ledger.final_bound!r}")
    return EXIT_PARTIAL if ledger.budget_exceeded else EXIT_OK


@command("measure")
@argument("spec", help="system spec (JSON) with probabilities")
@help("Approximate the attractor and Hutchinson measure jointly.")
def measure(namespace: Namespace) -> int:
    started = time.perf_counter()
    config = get_config()
    spec, spec_hash = _load(namespace.spec)
    p = spec.to_gifsp()

    start = diagonal_fixed_point(p.system)
    out_dir: Path = config.out_dir
    evaluations: list[JointResult] = []
    try:
        result = joint_iterate(
            p,
            PointSet([start]),
            DiscreteMeasure.dirac(start),
            config.beta_schedule,
            config.sigma_schedule,
            config.K,
            config.w_min,
            config.budget,
            evaluations=evaluations,
        )
    except BudgetExceededError as e:
        return _write_partial(namespace, out_dir, started, e, spec_hash)

    write_pointset_csv(out_dir / "attractor.csv", result.attractor)
    write_measure_csv(out_dir / "measure.csv", result.measure)
    write_ledger_csv(out_dir / "ledger.csv", result.ledger)
    write_reports_csv(
        out_dir / "inner_attractor.csv", [r.attractor_report for r in evaluations]
    )
    write_reports_csv(
        out_dir / "inner_measure.csv", [r.measure_report for r in evaluations]
    )
    _write_manifest(
        namespace,
        out_dir,
        started,
        [
            "attractor.csv",
            "measure.csv",
            "ledger.csv",
            "inner_attractor.csv",
            "inner_measure.csv",
        ],
        {"joint": result.ledger.final_bound},
        spec_hash,
    )
    for note in result.ledger.notes:
        print(f"note: {note}")
    print(f"points: {len(result.attractor)}, atoms: {len(result.measure)}")
    print(f"certified bound: {result.ledger.final_bound!r}")
    return EXIT_PARTIAL if result.ledger.budget_exceeded else EXIT_OK


@command("chaos")
@argument("spec", help="system spec (JSON) with probabilities")
@argument("--length", type=int, default=10**5, help="steps per orbit")
@argument("--burn-in", type=int, default=100, help="discarded leading points")
@argument("--orbits", type=int, default=1, help="number of independent orbits")
@argument("--bin-width", type=float, default=1e-2, help="occupation measure bin width")
@argument("--nu", default=None, help="measure CSV on tail arguments (default: Dirac)")
@argument("--reference", default=None, help="attractor CSV for diagnostics")
@argument("--reference-measure", default=None, help="measure CSV for diagnostics")
@argument(
    "--observable",
    action="append",
    default=None,
    help="observable to average, repeatable (" + _OBSERVABLE_NAMES + ")",
)
@help("Run random orbits of the induced system (experimental).")
def chaos(namespace: Namespace) -> int:
    started = time.perf_counter()
    config = get_config()
    spec, spec_hash = _load(namespace.spec)
    p = spec.to_gifsp()

    start = diagonal_fixed_point(p.system)
    nu = (
        read_measure_csv(Path(namespace.nu))
        if namespace.nu is not None
        else DiscreteMeasure.dirac(start)
    )
    base = OrbitConfig(
        tuple(float(x) for x in start), config.seed, namespace.burn_in, namespace.length
    )
    configs = [base.with_seed(config.seed + i) for i in range(namespace.orbits)]
    orbits = OrbitRunner.create(namespace.jobs).run(p, nu, configs)

    out_dir: Path = config.out_dir
    names: list[str] = []
    for i, orbit in enumerate(orbits):
        name = f"orbit_{i}.csv"
        write_pointset_csv(out_dir / name, orbit)
        names.append(name)
    points = np.concatenate(orbits)
    empirical = empirical_measure(points, namespace.bin_width)
    write_measure_csv(out_dir / "empirical.csv", empirical)
    names.append("empirical.csv")

    reference = (
        read_pointset_csv(Path(namespace.reference))
        if namespace.reference is not None
        else None
    )
    reference_measure = (
        read_measure_csv(Path(namespace.reference_measure))
        if namespace.reference_measure is not None
        else None
    )
    diagnostics = orbit_diagnostics(
        points, reference, reference_measure, namespace.bin_width
    )
    bounds: dict[str, float] = {}
    if diagnostics.hausdorff is not None:
        bounds["hausdorff_to_reference"] = diagnostics.hausdorff
        print(f"hausdorff to reference: {diagnostics.hausdorff!r}")
    if diagnostics.mk is not None:
        bounds["mk_to_reference"] = diagnostics.mk
        print(f"mk to reference: {diagnostics.mk!r}")

    for observable in namespace.observable or ["identity"]:
        print(f"average {observable}: {ergodic_average(points, observable)!r}")

    _write_manifest(
        namespace,
        out_dir,
        started,
        names,
        bounds,
        spec_hash,
        {f"orbit_{i}": c.rng_seed for i, c in enumerate(configs)},
    )
    return EXIT_OK


@command("distance")
@argument("first", help="first CSV file")
@argument("second", help="second CSV file")
@argument("--mk", action="store_true", help="MK distance of measure CSVs")
@argument("--hausdorff", action="store_true", help="Hausdorff distance of point sets")
@help("Print the distance between two files.")
def distance(namespace: Namespace) -> int:
    if namespace.mk and namespace.hausdorff:
        raise InvalidInputError("Choose one of --hausdorff and --mk.")
    first = Path(namespace.first)
    second = Path(namespace.second)
    if namespace.mk:
        value = mk_distance(
            read_measure_csv(first),
            read_measure_csv(second),
            method=get_config().transport,
        )
    else:
        value = hausdorff(read_pointset_csv(first), read_pointset_csv(second))
    print(repr(value))
    return EXIT_OK


@command("render")
@argument("input", help="point set CSV")
@argument("-o", "--output", default=None, help="PGM path (default: OUT_DIR/*.pgm)")
@argument("--width", type=int, default=512, help="canvas width")
@argument("--height", type=int, default=512, help="canvas height")
@help("Render a point set CSV as a PGM image.")
def render(namespace: Namespace) -> int:
    config = get_config()
    source = Path(namespace.input)
    output = (
        Path(namespace.output)
        if namespace.output is not None
        else config.out_dir / (source.stem + ".pgm")
    )
    points = read_pointset_csv(source)
    raster = render_pointset(points, namespace.width, namespace.height)
    write_pgm(output, raster)
    print(f"lit pixels: {int(np.count_nonzero(raster))}")
    return EXIT_OK
