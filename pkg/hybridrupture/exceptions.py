class HybridRuptureBaseExceptions(Exception):
    '''base para todas as exceções da biblioteca "hybridrupture"'''


class PathNotFoundException(HybridRuptureBaseExceptions):
    """caminho não encontrado"""


class NotFileException(HybridRuptureBaseExceptions):
    """o caminho não leva à um arquivo"""


class NotDirectoryException(HybridRuptureBaseExceptions):
    """o caminho não leva à um diretório"""


class PathExistsException(HybridRuptureBaseExceptions):
    """o caminho já existe"""


class EnvironmentVariableRequiredException(HybridRuptureBaseExceptions):
    """variável de ambiente obrigatória ausente"""


class UnexpectedTypeException(HybridRuptureBaseExceptions):
    """tipo do valor inesperado em um parâmetro"""


class UnexpectedValueException(HybridRuptureBaseExceptions):
    """valor de um parâmetro inesperado"""


class InvalidGridException(HybridRuptureBaseExceptions):
    """malha estruturada inválida (dimensões não comensuráveis ou inadmissíveis para a FFT)"""


class InvalidMaterialException(HybridRuptureBaseExceptions):
    """material elástico com parâmetros fisicamente inválidos"""


class RegionOutsideStripException(HybridRuptureBaseExceptions):
    """região de material fora da faixa virtual"""


class InvalidFaultException(HybridRuptureBaseExceptions):
    """falha mal definida (fora de um plano de nós ou da malha)"""


class NucleationOutsideFaultException(HybridRuptureBaseExceptions):
    """região de nucleação fora da falha"""


class ZeroNodalMassException(HybridRuptureBaseExceptions):
    """nó da falha sem massa"""


class InvalidScenarioException(HybridRuptureBaseExceptions):
    """cenário inconsistente"""


class InvalidConfigException(HybridRuptureBaseExceptions):
    """arquivo de configuração inválido"""


class InstabilityException(HybridRuptureBaseExceptions):
    """integração temporal instável (velocidades explodiram)"""


class NonFiniteFieldException(HybridRuptureBaseExceptions):
    """campo com NaN ou infinito"""


class TimeStepMismatchException(HybridRuptureBaseExceptions):
    """componentes com passos de tempo diferentes"""


class UnmappedBoundaryNodeException(HybridRuptureBaseExceptions):
    """nó de fronteira sem correspondente na grade SBI"""


class HistoryPushException(HybridRuptureBaseExceptions):
    """histórico empurrado duas vezes no mesmo passo"""


class MissingKernelException(HybridRuptureBaseExceptions):
    """tabela de núcleos sem o modo requisitado"""


class SizeMismatchException(HybridRuptureBaseExceptions):
    """campo com dimensões diferentes da grade"""


class UnsupportedMaterialException(HybridRuptureBaseExceptions):
    """material heterogêneo em um solver que só aceita meio homogêneo"""


class NonNestedGridsException(HybridRuptureBaseExceptions):
    """malhas não aninhadas no estudo de convergência"""


class UnknownPlotKindException(HybridRuptureBaseExceptions):
    """tipo de gráfico desconhecido"""


class OutputWriteException(HybridRuptureBaseExceptions):
    """falha ao gravar resultados"""
