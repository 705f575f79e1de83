import os
import re
import json
import pytest
from io import TextIOWrapper

from hybridrupture.core.utils import *
from hybridrupture.core.messeger import PATH_NOT_FOUND, UNEXPECTED_VALUE
from hybridrupture.exceptions import (
    UnexpectedTypeException,
    UnexpectedValueException,
    InvalidConfigException,
    PathNotFoundException,
    PathExistsException
)

from tests_hybridrupture.conftest import compare, create_structure_path

SCHEMA = {
    "type": "object",
    "properties": {"dx": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["dx"]
}


def test__parse_message():
    assert PATH_NOT_FOUND == "the <TYPE> <PATH> was not found! <COMPLEMENT>"

    assert parse_message(PATH_NOT_FOUND, PATH="./run/stations", TYPE="directory") == "the directory ./run/stations was not found!"
    assert parse_message(PATH_NOT_FOUND, "run the solver first.", PATH="./run/manifest.json", TYPE="file") == "the file ./run/manifest.json was not found! run the solver first."


def test__check_type():
    check_type("build_grid(...)", "dx", 50.0, (int, float))
    check_type("build_grid(...)", "origin", None, tuple, optional=True)

    with pytest.raises(UnexpectedTypeException):
        check_type("build_grid(...)", "dx", "50", (int, float))

    # bool não conta como número
    with pytest.raises(UnexpectedTypeException):
        check_type("build_grid(...)", "dx", True, (int, float))


def test__check_value():
    check_value("build_grid(...)", "dx", 50.0, True)

    with pytest.raises(UnexpectedValueException) as error:
        check_value("build_grid(...)", "dx", -1.0, False)

    assert str(error.value) == parse_message(UNEXPECTED_VALUE, METHOD="build_grid(...)", PARAMETER="dx", RECEIVED=-1.0)


def test__is_admissible_size():
    assert is_admissible_size(600)
    assert is_admissible_size(96)
    assert is_admissible_size(1)

    assert not is_admissible_size(7)
    assert not is_admissible_size(0)
    assert not is_admissible_size(-4)
    assert not is_admissible_size(4.0)


def test__validate_json():
    validate_json({"dx": 50.0}, SCHEMA)

    with pytest.raises(InvalidConfigException) as error:
        validate_json({"dx": -1.0}, SCHEMA, "run.json")

    assert "run.json" in str(error.value)
    assert "dx" in str(error.value)


def test__dump_json__load_json(data_to_tests: Path):
    data_to_tests.mkdir(True)
    path = data_to_tests.join("config.json")

    text = dump_json({"dx": 50.0, "b": [1, 2]}, path, SCHEMA)

    assert text == json.dumps({"b": [1, 2], "dx": 50.0}, indent=4, sort_keys=True)
    assert load_json(path, SCHEMA) == {"dx": 50.0, "b": [1, 2]}

    broken = data_to_tests.join("broken.json")
    with broken.file("w", True) as file:
        file.write("{dx: ")

    with pytest.raises(InvalidConfigException):
        load_json(broken)

    with pytest.raises(InvalidConfigException):
        dump_json({"dx": 0}, schema=SCHEMA)


def test__path():
    path = Path(".", "test", "testing")

    _path = os.path.join(".", "test", "testing")

    assert compare(path, _path)
    assert re.escape(repr(path)) == re.escape(f'<Path: "{_path}">')

    assert path.name == "testing"
    assert path.exists == os.path.exists(_path)
    assert path == Path(".", "test", "testing")
    assert len({path, Path(".", "test", "testing")}) == 1


def test__path__join():
    path = Path(".", "project_name")

    default_path = os.path.join(".", "project_name")
    joined_path = os.path.join(default_path, "join")

    assert compare(path, default_path)

    new_path_joinend = path.join("join")
    assert compare(new_path_joinend, joined_path)

    assert not compare(path, joined_path)
    assert compare(path, default_path)

    path.join("join", in_self=True)

    assert compare(path, joined_path)
    assert not compare(path, default_path)


def test__path__exists():
    tests_path = Path(".", "tests_hybridrupture")
    assert tests_path.exists

    conftest_path = tests_path.join("conftest.py")
    assert conftest_path.exists

    non_existent_path = tests_path.join("non_existent_path.txt")
    assert not non_existent_path.exists


def test__path__file(data_to_tests: Path):
    data_to_tests.mkdir(True)
    assert data_to_tests.exists

    path = data_to_tests.join("test_file.txt")

    assert not path.exists

    with pytest.raises(PathNotFoundException):
        path.file()

    with path.file(mode="w", non_existent_ok=True) as file:
        assert type(file) == TextIOWrapper
        assert file.mode == "w"
        assert compare(path, file.name)

    assert path.exists

    with pytest.raises(UnexpectedValueException):
        path.file(mode="q")


def test__path__items(data_to_tests: Path):
    items = {
        "directory1": "directory",
        "directory2": "directory",
        "file1.txt": "file",
        "file2.txt": "file"
    }

    assert not data_to_tests.exists

    create_structure_path(data_to_tests)

    assert data_to_tests.exists

    main = data_to_tests.join("example_structure_path")

    assert [item.name for item in main.items()] == sorted(items)
    assert [item.name for item in main.items(["file1.txt"])] == ["directory1", "directory2", "file2.txt"]

    for item in main.items():
        assert item.is_type(items[item.name])


def test__path__mkdir(data_to_tests: Path):
    directory = data_to_tests.join("directory")
    subdirectory = directory.join("subdirectory")

    assert not directory.exists
    assert not subdirectory.exists

    subdirectory.mkdir(exists_ok=True)

    assert directory.exists
    assert subdirectory.exists

    with pytest.raises(PathExistsException):
        subdirectory.mkdir()


def test__path__is_type(data_to_tests: Path):
    directory = data_to_tests.join("directory")
    directory.mkdir(True)

    file = data_to_tests.join("file.txt")
    file.file("w", True).close()

    assert directory.exists
    assert file.exists

    assert directory.is_type() == "directory"
    assert file.is_type() == "file"

    assert directory.is_type("directory")
    assert file.is_type("file")
    assert not data_to_tests.join("missing").is_type("file")


def test__path__remove(data_to_tests: Path):
    root = data_to_tests.join("root")

    create_structure_path(root)

    assert root.exists

    root.remove(non_existent_ok=True)

    assert not root.exists

    with pytest.raises(PathNotFoundException):
        root.remove()


def test__path__name(data_to_tests: Path):
    assert data_to_tests.name == "data_to_tests"
