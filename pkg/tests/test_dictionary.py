import pytest

from src.dictionary import ENTRIES, dictionary_lookup, leibniz, substitute
from src.exceptions import UnsupportedInvariantError
from src.tensors import tp, tsum


def test_laplacian() -> None:
    """Тестирование индексной формы лапласиана"""
    assert dictionary_lookup("laplacian") == tp("f[q q~]", -4)
    assert dictionary_lookup("laplacian", "h") == tp("h[q q~]", -4)


@pytest.mark.parametrize("name", sorted(ENTRIES))
def test_entries_are_well_formed(name: str) -> None:
    """Тестирование: все записи словаря строят корректные многочлены"""
    assert not dictionary_lookup(name).is_zero()


def test_poisson_antisymmetric() -> None:
    """Тестирование антисимметрии скобки Пуассона"""
    assert dictionary_lookup("poisson", "f", "g") == -dictionary_lookup("poisson", "g", "f")


def test_unknown_invariant() -> None:
    """Тестирование ошибки: инварианта нет в словаре"""
    with pytest.raises(UnsupportedInvariantError) as exc_info:
        dictionary_lookup("bismut")
    assert str(exc_info.value) == "Инвариант bismut отсутствует в словаре"


def test_leibniz() -> None:
    """Тестирование раскрытия (fg)_{uū} по правилу Лейбница"""
    expected = tsum(tp("f[u u~] g"), tp("f[u] g[u~]"), tp("f[u~] g[u]"), tp("f g[u u~]"))
    assert leibniz(tp("F[u u~]"), "F", "f", "g") == expected


def test_leibniz_without_tag() -> None:
    """Тестирование: многочлен без наблюдаемой-произведения не меняется"""
    assert leibniz(tp("sc h"), "F", "f", "g") == tp("sc h")


def test_substitute_first_derivative() -> None:
    """Тестирование подстановки функции вместо наблюдаемой"""
    assert substitute(tp("F[u]"), "F", tp("f g")) == tp("f[u] g") + tp("f g[u]")
    assert substitute(tp("F"), "F", tp("f g", 3)) == tp("f g", 3)
