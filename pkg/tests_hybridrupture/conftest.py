import os
import pytest

from hybridrupture import Path, EnvHandler, ElasticMaterial, Scenario, FaultSpec, Station, SlipWeakeningLaw, Prestress, NucleationPatch
from hybridrupture.core.messeger import ENV_THREADS, ENV_OUTPUT, ENV_LOG_LEVEL


def compare(param1: Path, param2: str) -> bool:
    return str(param1) == str(param2)


@pytest.fixture
def data_to_tests() -> Path:
    path = Path(".", "tests_hybridrupture", "data_to_tests")
    return path


def create_structure_path(path: Path):
    path.mkdir(True)

    main = path.join("example_structure_path")
    main.mkdir(exists_ok=True)

    directory1 = main.join("directory1")
    directory1.mkdir(exists_ok=True)

    directory2 = main.join("directory2")
    directory2.mkdir(exists_ok=True)

    file1 = main.join("file1.txt")
    file1.file("w", non_existent_ok=True).close()

    file2 = main.join("file2.txt")
    file2.file("w", non_existent_ok=True).close()


@pytest.fixture
def test_env(data_to_tests: Path) -> Path:
    data_to_tests.mkdir(True)

    path = data_to_tests.join("tests.env")
    return path


def configure_env(test_env: Path, data_to_tests: Path) -> EnvHandler:
    env = EnvHandler.unique(test_env)
    env.set_env(
        HYBRIDRUPTURE_THREADS="2",
        HYBRIDRUPTURE_OUTPUT=str(data_to_tests.join("outputs")),
        HYBRIDRUPTURE_LOG_LEVEL="debug"
    )
    return env


@pytest.fixture
def host() -> ElasticMaterial:
    return ElasticMaterial.from_wavespeeds(2670.0, 6000.0, 3464.0, "host")


@pytest.fixture(autouse=True)
def remove_data_to_tests(data_to_tests: Path):
    data_to_tests.remove(non_existent_ok=True)

    yield

    data_to_tests.remove(non_existent_ok=True)
    for name in (ENV_THREADS, ENV_OUTPUT, ENV_LOG_LEVEL):
        os.environ.pop(name, None)
    EnvHandler.__instance__.clear()


def small_scenario(material: ElasticMaterial, nucleation: bool=True, duration: float=0.05) -> Scenario:
    """faixa two_sided de 800 m x 400 m x 800 m com uma falha de 400 m x 400 m no plano médio (dx = 100 m)."""
    patches = [NucleationPatch((-100.0, 100.0), (-100.0, 100.0), "stress_step", 81.6e6)] if nucleation else []
    fault = FaultSpec(
        "main", 0.0, (-200.0, 200.0), (-200.0, 200.0),
        SlipWeakeningLaw(0.677, 0.525, 0.4), Prestress(70e6, 120e6), patches
    )
    return Scenario(
        "small", 100.0, (800.0, 400.0, 800.0), (-400.0, -200.0, -400.0), "two_sided",
        [material], [], [fault], [Station("centre", "main", 0.0, 0.0)], duration
    )
