import pytest

from src.exceptions import FitError
from src.fitting import fit, loglog_slope


def test_fit_recovers_coefficients() -> None:
    """Тестирование подгонки точного разложения 2 + 3/p + 5/p²"""
    samples = [(p, p * (2 + 3 / p + 5 / p**2)) for p in range(1, 7)]
    result = fit(samples, n=1, max_order=2)
    assert result.coefficient(0) == pytest.approx(2)
    assert result.coefficient(1) == pytest.approx(3)
    assert result.coefficient(2) == pytest.approx(5)
    assert result.coefficient(3) == 0.0
    assert result.residual < 1e-9


def test_fit_complex_values() -> None:
    """Тестирование подгонки комплексных значений"""
    samples = [(p, 1j * (1 - 1 / p)) for p in range(2, 6)]
    result = fit(samples, n=0, max_order=1)
    assert result.coefficient(0) == pytest.approx(1j)
    assert result.coefficient(1) == pytest.approx(-1j)


def test_fit_too_few_points() -> None:
    """Тестирование ошибки: мало точек"""
    with pytest.raises(FitError) as exc_info:
        fit([(1, 1.0), (2, 1.0)], n=1, max_order=2)
    assert str(exc_info.value) == "Для порядка 2 нужно не меньше 4 точек, p ∈ [1, 2]"


def test_fit_repeated_levels() -> None:
    """Тестирование ошибки: повторяющиеся p"""
    with pytest.raises(FitError) as exc_info:
        fit([(3, 1.0), (3, 1.0), (4, 1.0), (5, 1.0)], n=1, max_order=2)
    assert str(exc_info.value) == "Повторяющиеся значения p, p ∈ [3, 5]"


def test_loglog_slope() -> None:
    """Тестирование наклона в логарифмическом масштабе"""
    assert loglog_slope([1, 2, 4], [1, 0.5, 0.25]) == pytest.approx(-1)


def test_loglog_slope_one_point() -> None:
    """Тестирование ошибки: одна точка"""
    with pytest.raises(FitError) as exc_info:
        loglog_slope([1], [1.0])
    assert str(exc_info.value) == "Наклон в логарифмическом масштабе не определён для 1 точек"
