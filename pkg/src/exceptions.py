from typing import Optional


class LabError(Exception):
    """Базовое исключение лаборатории"""

    def __init__(self, message: Optional[str] = None) -> None:
        """
        Инициализация исключения LabError
        :param message: Сообщение, описывающее причину исключения (по умолчанию None)
        """
        self.message = message
        super().__init__(message)


class StructuralError(LabError):
    """Некорректная структура тензорного множителя или свёртки индексов"""


class ResourceError(LabError):
    """Превышен бюджет перебора мономов"""


class QuadratureError(LabError):
    """Недостаточное разрешение квадратуры"""


class FitError(LabError):
    """Вырожденная задача подгонки асимптотики"""


class UnsupportedInvariantError(LabError):
    """Инвариант отсутствует в словаре индексных форм"""


class PreconditionError(LabError):
    """Нарушено предусловие операции"""


class ConfigError(LabError):
    """Ошибка конфигурации запуска"""
