# Development tasks (run with kumade)

import os
import subprocess
from pathlib import Path

import kumade as ku

import gifsolve

ku.set_default("test")

project_dir = Path(__file__).parent
package_dir = project_dir / "gifsolve"
tests_dir = project_dir / "tests"
python_sources = list(package_dir.glob("**/*.py")) + list(tests_dir.glob("**/*.py"))

# format, lint, and test -----------------------------------


@ku.task("format")
@ku.help("Format code by pysen.")
def format() -> None:
    subprocess.run(["pysen", "run", "format"])


@ku.task("lint")
@ku.help("Lint code by pysen.")
def lint() -> None:
    subprocess.run(["pysen", "run", "lint"])


ku.add_bool_config(
    "test_verbose",
    "Run unit test with verbose output if true.",
)

ku.add_bool_config(
    "test_slow",
    "Also run the desk-scale end-to-end checks if true.",
)


@ku.task("test")
@ku.help("Run unittest.")
def test() -> None:
    config = ku.get_config()
    command = ["python", "-m", "unittest"]
    if config.test_verbose:
        command.append("-v")
    env = None
    if config.test_slow:
        env = {**os.environ, "GIFSOLVE_SLOW": "1"}
    subprocess.run(command, env=env)


# coverage -------------------------------------------------

coverage_path = project_dir / ".coverage"


@ku.task("coverage")
@ku.depend(coverage_path)
@ku.help("Report coverage result.")
def report_coverage() -> None:
    subprocess.run(["coverage", "report", "-m", "--include", "gifsolve/*"])


@ku.file(coverage_path)
@ku.depend(*python_sources)
def make_coverage() -> None:
    subprocess.run(["coverage", "run", "-m", "unittest"])
    coverage_path.touch()


ku.clean("coverage.clean", [coverage_path], help="Clean coverage files.")

# demo -----------------------------------------------------

demo_dir = project_dir / "demo"
quarter_pair_spec = demo_dir / "quarter_pair.json"
sierpinski_spec = demo_dir / "sierpinski.json"

ku.directory(demo_dir)


@ku.file(quarter_pair_spec)
@ku.depend(demo_dir)
def create_quarter_pair_spec() -> None:
    quarter_pair_spec.write_text(
        '{"dim": 1, "order": 2, "probs": [0.5, 0.5], "maps": ['
        '{"matrices": [[0.25], [0.25]], "offset": [0.0]}, '
        '{"matrices": [[0.25], [0.25]], "offset": [0.5]}]}\n'
    )


@ku.file(sierpinski_spec)
@ku.depend(demo_dir)
def create_sierpinski_spec() -> None:
    sierpinski_spec.write_text(
        '{"dim": 2, "order": 1, "maps": ['
        '{"matrices": [[[0.5, 0.0], [0.0, 0.5]]], "offset": [0.0, 0.0]}, '
        '{"matrices": [[[0.5, 0.0], [0.0, 0.5]]], "offset": [0.5, 0.0]}, '
        '{"matrices": [[[0.5, 0.0], [0.0, 0.5]]], '
        '"offset": [0.25, 0.4330127018922193]}]}\n'
    )


def gifsolve_command(*args: str) -> None:
    subprocess.run(["gifsolve", "-v", *args], check=True)


@ku.task("demo.sierpinski")
@ku.depend(sierpinski_spec)
@ku.help("Compute and render the Sierpinski triangle as an order-1 GIFS.")
def demo_sierpinski() -> None:
    out_dir = demo_dir / "sierpinski"
    gifsolve_command(
        "attractor-evmap",
        str(sierpinski_spec),
        "--K",
        "1",
        "--sigma-schedule",
        "const:1e-3",
        "--out-dir",
        str(out_dir),
    )
    attractor_csv = str(out_dir / "attractor.csv")
    gifsolve_command("render", attractor_csv, "--out-dir", str(out_dir))


@ku.task("demo.measure")
@ku.depend(quarter_pair_spec)
@ku.help("Compute the attractor and Hutchinson measure of the quarter pair.")
def demo_measure() -> None:
    gifsolve_command(
        "measure",
        str(quarter_pair_spec),
        "--K",
        "8",
        "--beta-schedule",
        "geometric:0.5",
        "--sigma-schedule",
        "geometric:0.5",
        "--out-dir",
        str(demo_dir / "measure"),
    )


@ku.task("demo")
@ku.depend("demo.sierpinski", "demo.measure")
@ku.help("Run all demos.")
def demo() -> None:
    print(f"gifsolve {gifsolve.__version__}: outputs are in {demo_dir}")


ku.clean("demo.clean", [demo_dir], help="Clean demo outputs.")
