import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_state_vector(num_qubits: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(1 << num_qubits) + 1j * rng.standard_normal(1 << num_qubits)
    return amps / np.linalg.norm(amps)


def inverse_dft_matrix(q: int) -> np.ndarray:
    """Independently constructed conjugate-transpose DFT matrix (test oracle).

    W[j, k] = exp(-2*pi*i*j*k / 2**q) / sqrt(2**q).
    """
    dim = 1 << q
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(-2j * np.pi * j * k / dim) / np.sqrt(dim)


def forward_dft_matrix(q: int) -> np.ndarray:
    return inverse_dft_matrix(q).conj()
