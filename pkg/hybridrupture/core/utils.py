import os
import json
import typing
import jsonschema
from io import TextIOWrapper

from ..exceptions import *
from .messeger import (
    PATH_NOT_FOUND,
    NOT_DIRECTORY,
    NOT_FILE,
    DIRECTORY_ALREADY_EXISTS,
    UNEXPECTED_TYPE,
    UNEXPECTED_VALUE,
    OPEN_TEXT_MODE,
    INVALID_OPEN_TEXT_MODE,
    UNEXPECTED_EXPECTED,
    INVALID_CONFIG,
    SPECTRAL_PRIMES,
    WRITE_FAILED
)

_OPEN_TEXT_MODE: typing.TypeAlias = typing.Literal['r', 'rb', 'r+', 'rb+', 'w', 'wb', 'w+', 'wb+', 'a', 'ab', 'a+', 'ab+', 'x', 'xb', 'x+', 'xb+']

__all__ = [
    "Path",
    "parse_message",
    "check_type",
    "check_value",
    "is_admissible_size",
    "load_json",
    "dump_json",
    "validate_json",
]


def parse_message(message: str, complement: typing.Optional[str]=None, **replace: str) -> str:
    """
    (USO INTERNO) modifica mensagens especiais, trocando TAGS por palavras/frases.

    ### parâmetros:

        message (str): mensagem especial contendo <TAGS>
        complement (Optional[str]): complemento da mensagem
        **replace (dict[str, str]): nome das <TAGS> e suas substituições

    ### uso:

        from hybridrupture.core.messeger import PATH_NOT_FOUND

        print(PATH_NOT_FOUND) # "the <TYPE> <PATH> was not found! <COMPLEMENT>"

        message = parse_message(PATH_NOT_FOUND, PATH="./run/stations", TYPE="directory")
        print(message) # "the directory ./run/stations was not found!"
    """
    for tag, value in replace.items():
        message = message.replace(f"<{tag}>", str(value))

    complement = "" if complement is None else f" {complement}"
    message = message.replace(" <COMPLEMENT>", complement)

    return message


def check_type(method: str, parameter: str, value: typing.Any, expected: type|tuple[type, ...], optional: bool=False):
    """
    (USO INTERNO) gera UnexpectedTypeException quando "value" não é uma instância de "expected".

    ### parâmetros:

        method (str): nome do método que recebeu o valor, ex.: "build_grid(...)"
        parameter (str): nome do parâmetro
        value (Any): valor recebido
        expected (type|tuple[type, ...]): tipo(s) aceito(s)
        optional (bool): quando True, None é aceito
    """
    if optional and value is None:
        return
    if isinstance(value, bool) and bool not in (expected if isinstance(expected, tuple) else (expected,)):
        ok = False
    else:
        ok = isinstance(value, expected)

    if not ok:
        names = "|".join(t.__name__ for t in expected) if isinstance(expected, tuple) else expected.__name__
        raise UnexpectedTypeException(parse_message(
            UNEXPECTED_TYPE,
            METHOD=method,
            EXPECTED=names,
            PARAMETER=parameter,
            RECEIVED=f"{type(value).__name__} ({value})"
        ))


def check_value(method: str, parameter: str, value: typing.Any, condition: bool, complement: typing.Optional[str]=None):
    """(USO INTERNO) gera UnexpectedValueException quando "condition" é falsa."""
    if not condition:
        raise UnexpectedValueException(parse_message(
            UNEXPECTED_VALUE,
            complement,
            METHOD=method,
            PARAMETER=parameter,
            RECEIVED=value
        ))


def is_admissible_size(n: int) -> bool:
    """
    verifica se n é aceito pela transformada da fronteira (n > 0 com fatores primos apenas 2, 3 e 5).

    ### uso:

        is_admissible_size(600) # True (2³·3·5²)
        is_admissible_size(7) # False
    """
    if not isinstance(n, (int,)) or isinstance(n, bool) or n <= 0:
        return False
    for prime in SPECTRAL_PRIMES:
        while n % prime == 0:
            n //= prime
    return n == 1


def validate_json(data: dict, schema: dict, source: str="<memory>"):
    """
    valida "data" com jsonschema, convertendo o erro em InvalidConfigException.
    """
    try:
        jsonschema.validate(instance=data, schema=schema)
    except jsonschema.ValidationError as error:
        location = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise InvalidConfigException(parse_message(
            INVALID_CONFIG,
            PATH=source,
            REASON=f"{location}: {error.message}"
        )) from error


def load_json(path: "Path", schema: typing.Optional[dict]=None) -> dict:
    """
    lê um arquivo JSON e, se "schema" for informado, valida seu conteúdo.

    ### parâmetros:

        path (Path): arquivo JSON
        schema (Optional[dict]): esquema jsonschema
    """
    with path.file("r") as file:
        try:
            data = json.load(file)
        except json.JSONDecodeError as error:
            raise InvalidConfigException(parse_message(INVALID_CONFIG, PATH=str(path), REASON=str(error))) from error

    if schema is not None:
        validate_json(data, schema, str(path))

    return data


def dump_json(data: dict, path: typing.Optional["Path"]=None, schema: typing.Optional[dict]=None) -> str:
    """
    serialização canônica (indentação 4, chaves ordenadas); grava em "path" quando informado.
    """
    if schema is not None:
        validate_json(data, schema, str(path) if path else "<memory>")

    text = json.dumps(data, indent=4, sort_keys=True)
    if path is not None:
        try:
            with path.file("w", non_existent_ok=True) as file:
                file.write(text + "\n")
        except OSError as error:
            raise OutputWriteException(parse_message(WRITE_FAILED, PATH=str(path), REASON=str(error))) from error

    return text


class Path:
    """
    classe baseada na biblioteca "os", representa um caminho que pode referenciar diretórios ou arquivos

    ### métodos:

        def join(self, *paths: str, in_self: bool=False) -> Path: adiciona um componente ao caminho já representado

        @property
        def exists(self) -> bool: verifica se o caminho representado existe

        def file(self, mode: _OPEN_TEXT_MODE="r", non_existent_ok: bool=False) -> TextIO: abre um arquivo e retorna-o

        def items(self, ignore: list[str]|None=None) -> list[Path]: componentes do diretório representado

        def mkdir(self, exists_ok: bool=False): cria todos os diretórios do caminho representado caso não existam

        def remove(self, non_existent_ok: bool=False): apaga o componente representado (arquivo ou diretório)

        @property
        def name(self) -> str: retorna o nome do diretório ou arquivo representado

    ### uso:

        path = Path(".", "outputs", "tpv3_run")

        path.mkdir(exists_ok=True)

        stations = path.join("stations") # nova instância
        print(stations) # "./outputs/tpv3_run/stations"
    """

    __slots__ = ["_paths"]

    def __init__(self, *paths: str):
        self._paths = Path._parse_path(paths)


    @staticmethod
    def _parse_path(paths: str|tuple[str]) -> list[str]:
        paths = list(str(p) for p in paths) if isinstance(paths, (tuple, list)) else [str(paths)]
        return paths


    def join(self, *paths: str, in_self: bool=False) -> typing.Optional["Path"]:
        """
        adiciona um componente ao caminho já representado

        ### parâmetros:

            paths (tuple[str]): nomes dos componentes que serão adicionados no caminho já salvo
            in_self (bool): define se os componentes serão adicionados na mesma classe ou gerarão um classe nova
        """
        paths = [str(self)] + Path._parse_path(paths)
        if not in_self:
            return Path(*paths)

        self._paths = paths


    @property
    def exists(self) -> bool:
        """verifica se o caminho representado existe."""
        return os.path.exists(str(self))


    def file(self, mode: _OPEN_TEXT_MODE="r", non_existent_ok: bool=False) -> TextIOWrapper:
        """
        abre um arquivo e retorna-o, possibilitando manipulação.

        ### parâmetros:

            mode (_OPEN_TEXT_MODE): modo de abertura do arquivo ("r", "w", "wb", ...)
            non_existent_ok (bool): quando False, gera um erro caso o arquivo não exista

        ### uso:

            path = Path(".", "outputs", "manifest.json")

            with path.file("w", non_existent_ok=True) as file:
                file.write("{}")
        """
        if not mode in OPEN_TEXT_MODE:
            raise UnexpectedValueException(parse_message(INVALID_OPEN_TEXT_MODE, MODE=mode))
        elif not self.exists:
            if not non_existent_ok:
                raise PathNotFoundException(parse_message(PATH_NOT_FOUND, PATH=str(self), TYPE="file"))
        elif not self.is_type("file"):
            raise NotFileException(parse_message(NOT_FILE, PATH=str(self)))

        return open(str(self), mode)


    def items(self, ignore: typing.Optional[list[str]]=None) -> list["Path"]:
        """
        retorna os componentes do diretório representado, em ordem alfabética.
        """
        if ignore is not None and not isinstance(ignore, list):
            raise UnexpectedTypeException(parse_message(
                UNEXPECTED_TYPE,
                METHOD="Path.items(...)",
                EXPECTED="list",
                PARAMETER="ignore",
                RECEIVED=f"{type(ignore).__name__} ({ignore})"
            ))
        elif not self.exists:
            raise PathNotFoundException(parse_message(PATH_NOT_FOUND, PATH=self, TYPE="directory"))
        elif not self.is_type("directory"):
            raise NotDirectoryException(parse_message(NOT_DIRECTORY, PATH=self))

        return [
            Path(str(self), name) for name in sorted(os.listdir(str(self)))
            if not ignore or name not in ignore
        ]


    def mkdir(self, exists_ok: bool=False):
        """
        cria todos os diretórios do caminho caso não existam.

        ### parâmetros:

            exists_ok (bool): quando False, gera um erro se o diretório já existir
        """
        if os.path.exists(str(self)):
            if exists_ok:
                return
            raise PathExistsException(parse_message(DIRECTORY_ALREADY_EXISTS, PATH=str(self)))

        os.makedirs(str(self), exist_ok=exists_ok)


    def is_type(self, expected: typing.Optional[typing.Literal["directory", "file"]]=None) -> bool|typing.Literal["directory", "file"]:
        if expected and expected not in ["directory", "file"]:
            raise UnexpectedValueException(parse_message(UNEXPECTED_EXPECTED, EXPECTED=expected))
        elif not self.exists:
            if expected is None:
                raise PathNotFoundException(parse_message(PATH_NOT_FOUND, PATH=str(self), TYPE="path"))
            return False
        typ = "directory" if os.path.isdir(str(self)) else "file"

        return typ == expected if expected else typ


    def remove(self, non_existent_ok: bool=False):
        """
        apaga o componente representado (arquivo ou diretório, recursivamente).

        ### parâmetros:

            non_existent_ok (bool): quando False, caso o componente não exista gera um erro (PathNotFoundException)
        """
        if not self.exists:
            if non_existent_ok:
                return
            raise PathNotFoundException(parse_message(PATH_NOT_FOUND, PATH=self, TYPE="path"))

        if self.is_type("directory"):
            for item in self.items():
                item.remove(non_existent_ok=True)
            os.rmdir(str(self))
        else:
            os.remove(str(self))


    @property
    def name(self) -> str:
        """retorna o nome do diretório ou arquivo representado"""
        return os.path.basename(str(self))


    def __str__(self) -> str:
        return os.path.join(*self._paths)


    def __repr__(self) -> str:
        return f'<Path: "{str(self)}">'


    def __eq__(self, other: object) -> bool:
        return isinstance(other, Path) and os.path.normpath(str(self)) == os.path.normpath(str(other))


    def __hash__(self) -> int:
        return hash(os.path.normpath(str(self)))
