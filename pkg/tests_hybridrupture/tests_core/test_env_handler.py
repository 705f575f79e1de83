import os
import pytest

from hybridrupture import EnvHandler, Path
from hybridrupture.core.messeger import ENV_THREADS
from hybridrupture.exceptions import UnexpectedValueException, UnexpectedTypeException

from tests_hybridrupture.conftest import configure_env


def gen_env(test_env: Path):
    with test_env.file("w", True) as env:
        env.write('''
HYBRIDRUPTURE_THREADS='4'
HYBRIDRUPTURE_OUTPUT='runs'
TEST='test'
''')


@pytest.fixture
def env(test_env: Path, data_to_tests: Path):
    configure_env(test_env, data_to_tests)
    _e = EnvHandler(test_env)
    _e.load()
    return _e


def test__env_handler(env: EnvHandler, test_env: Path):
    assert repr(env) == f"<EnvHandler: {test_env}>"
    assert str(env) == str(test_env)


def test__env_handler__properties(env: EnvHandler, data_to_tests: Path):
    assert env.threads == 2
    assert env.output_root == data_to_tests.join("outputs")
    assert env.log_level == "DEBUG"


def test__env_handler__defaults(data_to_tests: Path):
    data_to_tests.mkdir(True)
    for name in ("HYBRIDRUPTURE_THREADS", "HYBRIDRUPTURE_OUTPUT", "HYBRIDRUPTURE_LOG_LEVEL"):
        os.environ.pop(name, None)

    env = EnvHandler(data_to_tests.join("missing.env"))

    assert env.threads == 1
    assert env.output_root == Path("outputs")
    assert env.log_level == "INFO"


def test__env_handler__load(env: EnvHandler, test_env: Path):
    assert env.HYBRIDRUPTURE_THREADS == "2"

    env.set_env(
        reload=False,
        HYBRIDRUPTURE_THREADS="6"
    )

    assert env.HYBRIDRUPTURE_THREADS == "2"

    content: list
    with test_env.file() as file:
        content = [c.strip() for c in file.readlines()]

    assert "HYBRIDRUPTURE_THREADS='6'" in content

    env.load()

    assert env.HYBRIDRUPTURE_THREADS == "6"
    assert env.threads == 6


def test__env_handler__file_overrides_process(test_env: Path):
    os.environ[ENV_THREADS] = "3"
    gen_env(test_env)

    env = EnvHandler(test_env)

    assert env.threads == 4
    assert env.output_root == Path("runs")


def test__env_handler__invalid_threads(env: EnvHandler):
    env.set_env(HYBRIDRUPTURE_THREADS="zero")

    with pytest.raises(UnexpectedValueException):
        env.threads

    env.set_env(HYBRIDRUPTURE_THREADS="0")

    with pytest.raises(UnexpectedValueException):
        env.threads


def test__env_handler__set_default(env: EnvHandler):
    assert env.HYBRIDRUPTURE_THREADS == "2"

    env.set_env(
        HYBRIDRUPTURE_THREADS={"value": "8", "rule": "common"},
        setteds_ok=False
    )
    env.set_env(HYBRIDRUPTURE_THREADS="5")
    assert env.threads == 5

    env.set_default(exists_ok=False)

    assert env.threads == 8

    with pytest.raises(UnexpectedValueException):
        env.set_env(HYBRIDRUPTURE_THREADS={"value": "8", "rule": "optional"})


def test__env_handler__unique(env: EnvHandler, test_env: Path, data_to_tests: Path):
    other_path = data_to_tests.join("other.env")
    gen_env(other_path)
    other_env = EnvHandler(other_path)

    assert env != other_env

    env_unique = EnvHandler.unique(test_env)
    other_env_unique = EnvHandler.unique(other_path)

    assert env == env_unique
    assert other_env == other_env_unique

    with pytest.raises(UnexpectedTypeException):
        EnvHandler.unique(str(test_env))
