import os
import dotenv
from typing import TypeAlias, Literal, Optional

from .utils import parse_message, Path
from ..exceptions import *
from .messeger import (
    MISSING_VARIABLE,
    UNEXPECTED_TYPE,
    UNEXPECTED_RULE,
    UNEXPECTED_VALUE,
    ENV_THREADS,
    ENV_OUTPUT,
    ENV_LOG_LEVEL
)

_REQUIRED: TypeAlias = Literal["__REQUIRED__"]
_COMMON: TypeAlias = Literal["__COMMON__"]


_DEFAULT_PATH = Path(".env")
class EnvHandler:
    """
    classe responsável por manipular as variáveis de ambiente da execução.

    ### variáveis conhecidas:

        HYBRIDRUPTURE_THREADS: limite de threads de qualquer execução (padrão "1")
        HYBRIDRUPTURE_OUTPUT: diretório raiz dos resultados quando a configuração não define um (padrão "outputs")
        HYBRIDRUPTURE_LOG_LEVEL: nível do log da CLI (padrão "INFO")

    ### métodos:

        def load(self) -> None: carrega as variáveis já definidas (arquivo ".env" e ambiente do processo)

        def set_env(self, reload: bool=True, setteds_ok: bool=True, **envdata) -> None: define variáveis e grava seus valores no arquivo ".env"

        def set_default(self, exists_ok: bool=True, reload: bool=True): define todas as variáveis para os valores padrões

        @property
        def threads(self) -> int: limite de threads já convertido

        @classmethod
        def unique(cls, envpath: Path|None=None) -> EnvHandler: retorna uma instância única por envpath

    ### uso básico:

        env = EnvHandler.unique(Path(".env"))
        env.load()

        print(env.threads) # 1
        print(env.HYBRIDRUPTURE_OUTPUT) # "outputs"

    ### observação:

        - o arquivo ".env" só é criado quando set_env(...) ou set_default(exists_ok=False) grava algum valor
    """

    __instance__: dict[str, "EnvHandler"] = {}

    HYBRIDRUPTURE_THREADS: str
    HYBRIDRUPTURE_OUTPUT: str
    HYBRIDRUPTURE_LOG_LEVEL: str

    def __init__(self, envpath: Path=_DEFAULT_PATH):
        """
        cria uma nova instância de EnvHandler.

        ### parâmetros:

            envpath (Path): localização do arquivo ".env" (diferentes envpaths retornam instâncias diferentes)
        """
        if not isinstance(envpath, Path):
            raise UnexpectedTypeException(parse_message(
                UNEXPECTED_TYPE,
                METHOD="EnvHandler(...)",
                EXPECTED="Path",
                PARAMETER="envpath",
                RECEIVED=f"{type(envpath).__name__} ({envpath})"
            ))

        self.__expecteds__: dict[str, dict[Literal["rule", "default"], str|None]] = {
            ENV_THREADS: {"rule": _COMMON, "default": "1"},
            ENV_OUTPUT: {"rule": _COMMON, "default": "outputs"},
            ENV_LOG_LEVEL: {"rule": _COMMON, "default": "INFO"}
        }
        self._envpath = envpath
        self.load()

        self._set_unique_instance(str(envpath), self)


    def load(self):
        """
        carrega as variáveis de ambiente (o arquivo ".env" sobrescreve o ambiente do processo quando existe).
        """
        if self._envpath.exists:
            dotenv.load_dotenv(str(self._envpath), override=True)

        for envname, info in self.__expecteds__.items():
            rule = info["rule"]
            default = info["default"]

            value = os.getenv(envname, default)

            if not value and rule is _REQUIRED:
                raise EnvironmentVariableRequiredException(parse_message(MISSING_VARIABLE, NAME=envname))

            setattr(self, envname, value)


    def set_env(self, reload: bool=True, setteds_ok: bool=True, **envdata: str|dict[Literal["value", "rule"], str]):
        """
        define quais variáveis de ambiente serão carregadas e define/altera o valor delas no arquivo ".env".

        ### parâmetros:

            reload (bool): define se recarrega automaticamente ao adicionar as variáveis
            setteds_ok (bool): caso True, se uma variável já estiver carregada, suas regras não são alteradas
            envdata (dict[str, str|dict]): valor da variável, ou {"value": ..., "rule": "common"|"required"}

        ### uso:

            env = EnvHandler.unique(Path(".env"))

            env.set_env(HYBRIDRUPTURE_THREADS="8")
            print(env.threads) # 8
        """
        for envname, value in envdata.items():
            rule = "common"
            if isinstance(value, dict):
                rule = value["rule"]

                if rule not in ["common", "required"]:
                    raise UnexpectedValueException(parse_message(UNEXPECTED_RULE, RULE=rule))
                value = value["value"]

            if envname not in self.__expecteds__ or not setteds_ok:
                self.__expecteds__[envname] = {"rule": _REQUIRED, "default": None} if rule == "required" else {"rule": _COMMON, "default": str(value)}

            if not self._envpath.exists:
                with self._envpath.file("w", True):
                    pass
            dotenv.set_key(str(self._envpath), envname, str(value))

        if reload:
            self.load()


    def set_default(self, exists_ok: bool=True, reload: bool=True):
        """
        define todas as variáveis para os valores padrões.

        ### parâmetros:

            exists_ok (bool): quando True, se o arquivo ".env" já existir, não redefine os valores para o padrão
            reload (bool): define se recarrega automaticamente ao adicionar as variáveis
        """
        envs = {
            envname: info["default"] if info["rule"] is _COMMON else ""
            for envname, info in self.__expecteds__.items()
        }

        if not self._envpath.exists or not exists_ok:
            for envname, value in envs.items():
                os.environ.pop(envname, None)
            self.set_env(**envs, reload=False)

        if reload:
            self.load()


    @property
    def threads(self) -> int:
        """limite de threads (HYBRIDRUPTURE_THREADS) convertido para int."""
        value = getattr(self, ENV_THREADS, "1")
        try:
            threads = int(value)
        except (TypeError, ValueError):
            threads = 0
        if threads < 1:
            raise UnexpectedValueException(parse_message(
                UNEXPECTED_VALUE,
                "use a positive integer.",
                METHOD="EnvHandler.threads",
                PARAMETER=ENV_THREADS,
                RECEIVED=value
            ))
        return threads


    @property
    def output_root(self) -> Path:
        return Path(getattr(self, ENV_OUTPUT, "outputs"))


    @property
    def log_level(self) -> str:
        return str(getattr(self, ENV_LOG_LEVEL, "INFO")).upper()


    @classmethod
    def _set_unique_instance(cls, envpath: str, instance: "EnvHandler"):
        cls.__instance__[str(envpath)] = instance


    @classmethod
    def unique(cls, envpath: Optional[Path]=None) -> "EnvHandler":
        """
        retorna uma instância única e global de EnvHandler.

        ### parâmetros:

            envpath (Path): localização do arquivo ".env" (diferentes envpaths retornam instâncias diferentes)

        ### observação:

            - caso envpath não for informado, a primeira instância criada é retornada (ou uma nova com ".env")
        """
        if envpath is not None and not isinstance(envpath, Path):
            raise UnexpectedTypeException(parse_message(
                UNEXPECTED_TYPE,
                METHOD="EnvHandler.unique(...)",
                EXPECTED="Path",
                PARAMETER="envpath",
                RECEIVED=f"{type(envpath).__name__} ({envpath})"
            ))
        if envpath is None:
            if cls.__instance__:
                return next(iter(cls.__instance__.values()))
            envpath = _DEFAULT_PATH

        instance = cls.__instance__.get(str(envpath))

        if instance is None:
            instance = cls(envpath)

        return instance


    def __str__(self):
        return str(self._envpath)


    def __repr__(self):
        return f"<EnvHandler: {self._envpath}>"
