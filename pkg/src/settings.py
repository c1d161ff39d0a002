from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

# каталог отчётов по умолчанию
OUTPUT_DIR = BASE_DIR / "out"

# переменная окружения с ограничением числа потоков
THREADS_ENV = "SEMICLASS_THREADS"

# допуски по умолчанию
TOLERANCES = {
    "symbolic": 0.0,
    "density": 1e-10,
    "fit": 1e-6,
    "relative": 0.02,
    "slope": 0.2,
}

# потолок уровня p для численных экспериментов
P_MAX = 60

# бюджет перебора в equal_mod_relations
DEGREE_BUDGET = 8
DUMMY_BUDGET = 8
MONOMIAL_BUDGET = 5000

# случайное зерно по умолчанию
DEFAULT_SEED = 20240101
