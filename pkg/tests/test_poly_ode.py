import json

import numpy as np
import pytest

from src.exceptions import InputError, ModelParseError
from src.poly_ode import (
    PivotState,
    PolyODE,
    PolyTerm,
    eval_rhs,
    jacobian,
    parse_model,
    recenter,
    serialize_model,
)
from tests.conftest import random_ode


class TestPolyODE:
    def test_duplicate_terms_are_summed(self):
        ode = PolyODE(1, 2, (PolyTerm(2, 0, (0, 0), -0.5), PolyTerm(2, 0, (0, 0), -0.5)))
        assert ode.term_content() == {(2, 0, (0, 0)): -1.0}

    def test_cancelling_terms_are_dropped(self):
        ode = PolyODE(1, 1, (PolyTerm(1, 0, (0,), 1.0), PolyTerm(1, 0, (0,), -1.0)))
        assert ode.terms == ()
        assert ode.degrees_present == ()

    def test_coefficient_matrices_use_flat_columns(self):
        ode = PolyODE(2, 2, (PolyTerm(2, 1, (1, 0), 3.0),))
        f2 = ode.coefficient_matrices[2]
        assert f2.shape == (2, 4)
        assert f2[1, 2] == 3.0
        assert np.count_nonzero(f2) == 1

    @pytest.mark.parametrize(
        "term",
        [
            PolyTerm(3, 0, (0, 0, 0), 1.0),
            PolyTerm(1, 2, (0,), 1.0),
            PolyTerm(1, 0, (5,), 1.0),
            PolyTerm(2, 0, (0,), 1.0),
        ],
    )
    def test_invalid_terms_are_rejected(self, term):
        with pytest.raises(InputError):
            PolyODE(2, 2, (term,))


class TestEvaluation:
    def test_logistic(self, logistic):
        assert eval_rhs(logistic.ode, [0.5])[0] == pytest.approx(0.25)
        assert eval_rhs(logistic.ode, [1.0])[0] == 0.0

    def test_mixed_quadratic(self):
        ode = PolyODE(2, 2, (PolyTerm(2, 0, (0, 1), 2.0), PolyTerm(0, 1, (), 1.0)))
        np.testing.assert_allclose(eval_rhs(ode, [3.0, 4.0]), [24.0, 1.0])

    def test_dimension_mismatch_is_rejected(self, logistic):
        with pytest.raises(InputError):
            eval_rhs(logistic.ode, [0.1, 0.2])

    def test_jacobian_matches_central_differences(self, rng):
        for _ in range(120):
            n, degree = int(rng.integers(1, 5)), int(rng.integers(1, 4))
            ode = random_ode(rng, n, degree)
            x = rng.uniform(-1, 1, n)
            h = 1e-6
            numeric = np.column_stack([
                (eval_rhs(ode, x + h * e) - eval_rhs(ode, x - h * e)) / (2 * h) for e in np.eye(n)
            ])
            np.testing.assert_allclose(jacobian(ode, x), numeric, atol=1e-6)

    def test_logistic_jacobian(self, logistic):
        assert jacobian(logistic.ode, [0.25])[0, 0] == pytest.approx(0.5)


class TestRecenter:
    def test_is_exact(self, rng):
        for _ in range(150):
            n, degree = int(rng.integers(1, 5)), int(rng.integers(0, 4))
            ode = random_ode(rng, n, degree)
            s = rng.uniform(-1, 1, n)
            delta = rng.uniform(-1, 1, n)
            shifted = recenter(ode, s)
            assert shifted.degree == ode.degree
            np.testing.assert_allclose(eval_rhs(shifted, delta), eval_rhs(ode, s + delta), rtol=1e-12, atol=1e-12)

    def test_composes_additively(self, rng):
        for _ in range(100):
            n, degree = int(rng.integers(1, 5)), int(rng.integers(1, 4))
            ode = random_ode(rng, n, degree)
            s1, s2, delta = rng.uniform(-1, 1, size=(3, n))
            twice = recenter(recenter(ode, s1), s2)
            once = recenter(ode, s1 + s2)
            np.testing.assert_allclose(eval_rhs(twice, delta), eval_rhs(once, delta), rtol=1e-12, atol=1e-12)

    def test_zero_pivot_keeps_the_field(self, rng):
        ode = random_ode(rng, 2, 2)
        assert recenter(ode, np.zeros(2)).term_content() == ode.term_content()

    def test_linear_part_is_the_jacobian(self, rng):
        ode = random_ode(rng, 3, 3)
        s = rng.uniform(-1, 1, 3)
        shifted = recenter(ode, s)
        np.testing.assert_array_equal(shifted.coefficient_matrices[1], jacobian(ode, s))
        np.testing.assert_allclose(shifted.coefficient_matrices[0][:, 0], eval_rhs(ode, s), atol=1e-14)

    def test_logistic_at_one(self, logistic):
        shifted = recenter(logistic.ode, PivotState([1.0]))
        assert shifted.term_content() == {(1, 0, (0,)): -1.0, (2, 0, (0, 0)): -1.0}

    def test_non_finite_pivot_is_rejected(self, logistic):
        with pytest.raises(InputError):
            recenter(logistic.ode, [np.nan])


class TestModelFile:
    def test_parse_and_serialize_preserve_terms(self, kpp):
        parsed = parse_model(serialize_model(kpp.ode))
        assert (parsed.n, parsed.degree) == (kpp.ode.n, kpp.ode.degree)
        assert parsed.term_content() == kpp.ode.term_content()

    def test_parse_example(self):
        text = json.dumps({
            "n": 1,
            "degree": 2,
            "terms": [
                {"m": 1, "row": 0, "cols": [0], "value": 1.0},
                {"m": 2, "row": 0, "cols": [0, 0], "value": -1.0},
            ],
        })
        ode = parse_model(text)
        assert eval_rhs(ode, [0.5])[0] == pytest.approx(0.25)

    def test_malformed_json_reports_position(self):
        with pytest.raises(ModelParseError) as excinfo:
            parse_model('{"n": 1,\n "degree": }')
        assert excinfo.value.line == 2

    def test_cols_length_must_match_degree(self):
        text = json.dumps({"n": 1, "degree": 2, "terms": [{"m": 2, "row": 0, "cols": [0], "value": 1.0}]})
        with pytest.raises(ModelParseError) as excinfo:
            parse_model(text)
        assert excinfo.value.location.startswith("terms[0]")

    def test_column_digit_out_of_range_reports_location(self):
        text = json.dumps({"n": 2, "degree": 1, "terms": [{"m": 1, "row": 0, "cols": [2], "value": 1.0}]})
        with pytest.raises(ModelParseError) as excinfo:
            parse_model(text)
        assert excinfo.value.location == "terms[0].cols[0]"

    def test_term_degree_above_model_degree(self):
        text = json.dumps({"n": 1, "degree": 1, "terms": [{"m": 2, "row": 0, "cols": [0, 0], "value": 1.0}]})
        with pytest.raises(ModelParseError) as excinfo:
            parse_model(text)
        assert excinfo.value.location == "terms[0].m"

    def test_parse_error_is_an_input_error(self):
        with pytest.raises(InputError):
            parse_model("not json")
