from statistics import median

import numpy as np
from pytest import approx, raises

from sturm_riesz.models import Spectrum
from sturm_riesz.spectrum import (
    InsufficientSpectrumError,
    asymptotic_diagnostics,
    asymptotic_shift,
)


def test_asymptotic_diagnostics_classical(classical_spectrum: Spectrum) -> None:
    diagnostics = asymptotic_diagnostics(classical_spectrum, classical_spectrum.problem)

    assert diagnostics.indices == list(range(1, 21))
    assert diagnostics.xi == approx([0] * 20, abs=1e-6)
    assert diagnostics.offsets[1:] == approx([0] * 20, abs=1e-8)
    assert diagnostics.xi_decaying
    assert diagnostics.offsets_decaying


def test_asymptotic_diagnostics_symmetric(symmetric_spectrum: Spectrum) -> None:
    diagnostics = asymptotic_diagnostics(symmetric_spectrum, symmetric_spectrum.problem)

    assert asymptotic_shift(symmetric_spectrum.problem) == 1
    assert diagnostics.indices == list(range(2, 46))
    assert diagnostics.xi == approx([0] * 44, abs=1e-6)


def test_asymptotic_diagnostics_nonsymmetric(nonsymmetric_spectrum: Spectrum) -> None:
    diagnostics = asymptotic_diagnostics(
        nonsymmetric_spectrum, nonsymmetric_spectrum.problem
    )
    xi = dict(zip(diagnostics.indices, diagnostics.xi))
    tail = [abs(xi[n]) for n in range(20, 41)]

    assert max(tail) <= 0.1
    assert median(later / earlier for earlier, later in zip(tail, tail[1:])) <= 1
    assert diagnostics.xi_decaying

    sums = diagnostics.xi_square_partial_sums
    assert all(later >= earlier for earlier, later in zip(sums, sums[1:]))
    assert sums[-1] == approx(float(np.sum(np.square(diagnostics.xi))))


def test_asymptotic_diagnostics_too_few_pairs(classical_spectrum: Spectrum) -> None:
    spectrum = Spectrum(
        problem=classical_spectrum.problem, pairs=classical_spectrum.pairs[:9]
    )

    with raises(InsufficientSpectrumError):
        asymptotic_diagnostics(spectrum, spectrum.problem)
