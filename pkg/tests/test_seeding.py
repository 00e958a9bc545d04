import numpy as np
import pytest

from src.seeding import ROLES, child_seed, derive_seed, generator, stream

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class TestStreams:
    def test_same_coordinates_same_numbers(self):
        first = stream(7, 100, 3, role="sample").random(5)
        assert np.array_equal(first, stream(7, 100, 3, role="sample").random(5))

    def test_roles_are_independent(self):
        draws = {role: stream(7, 1, role=role).random() for role in ROLES}
        assert len(set(draws.values())) == len(ROLES)

    def test_coordinates_matter(self):
        assert child_seed(7, 1, 2, role="fit") != child_seed(7, 2, 1, role="fit")

    def test_seed_fits_in_signed_64_bits(self):
        assert 0 <= derive_seed(123, 4, 5) < 2**63

    def test_negative_coordinate(self):
        with pytest.raises(ValueError):
            generator(1, -1)

    def test_unknown_role(self):
        with pytest.raises(ValueError):
            stream(1, role="weather")
