import numpy as np
import pytest

from v2isim import LinkTable


def make_table(snr_rows, bandwidth_hz, is_lte, required_rate_bps=None,
               snr_threshold_db=-5.0) -> LinkTable:
    """Synthetic link table straight from SNR values (test fixture)."""
    snr = np.asarray(snr_rows, dtype=float)
    n_vn = snr.shape[0]
    if required_rate_bps is None:
        required_rate_bps = np.zeros(n_vn)
    return LinkTable(snr, np.asarray(bandwidth_hz, dtype=float),
                     np.asarray(is_lte, dtype=bool),
                     np.asarray(required_rate_bps, dtype=float),
                     snr_threshold_db)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
