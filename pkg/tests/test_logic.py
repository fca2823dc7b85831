"""Language core: signatures, ASTs, parsing/printing, and the prover."""

import random

import pytest

from attnplan.errors import FormulaSyntaxError, FormulaValidationError
from attnplan.logic import (
    And,
    AttEq,
    AttLess,
    Know,
    Not,
    PropAtom,
    Signature,
    TOP,
    Top,
    and_all,
    att_geq,
    att_gt,
    bot,
    entails,
    format_formula,
    iff,
    implies,
    is_satisfiable,
    is_valid,
    modal_depth,
    or_,
    or_all,
    parse_formula,
    subformulas,
    validate_formula,
)

from generators import SIG2, rand_formula

SIG = Signature(agents=("i",), attention_bound=3, prop_atoms=("p", "q"))


class TestSignature:
    def test_accepts_well_formed(self):
        sig = Signature(agents=("a", "b"), attention_bound=0, prop_atoms=("x1",))
        assert sig.attention_bound == 0

    def test_accepts_empty_atom_set(self):
        sig = Signature(agents=("a",), attention_bound=1, prop_atoms=())
        assert parse_formula(sig, "(att_a = 1)") == AttEq("a", 1)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(agents=(), attention_bound=1, prop_atoms=("p",)),
            dict(agents=("a", "a"), attention_bound=1, prop_atoms=("p",)),
            dict(agents=("a",), attention_bound=-1, prop_atoms=("p",)),
            dict(agents=("a",), attention_bound=1, prop_atoms=("p", "p")),
            dict(agents=("a",), attention_bound=1, prop_atoms=("T",)),
            dict(agents=("a",), attention_bound=1, prop_atoms=("att_a",)),
            dict(agents=("a",), attention_bound=1, prop_atoms=("K_a",)),
            dict(agents=("a",), attention_bound=1, prop_atoms=("9lives",)),
            dict(agents=("a-b",), attention_bound=1, prop_atoms=("p",)),
        ],
    )
    def test_rejects_malformed(self, kwargs):
        with pytest.raises(ValueError):
            Signature(**kwargs)

    def test_attention_atoms_ordered_per_agent(self):
        atoms = SIG2.attention_atoms()
        expected = [AttEq("a", n) for n in range(3)]
        expected += [AttLess("a", n) for n in range(3)]
        expected += [AttEq("b", n) for n in range(3)]
        expected += [AttLess("b", n) for n in range(3)]
        assert list(atoms) == expected


class TestParsing:
    @pytest.mark.parametrize(
        "text,ast",
        [
            ("T", TOP),
            ("p", PropAtom("p")),
            ("~p", Not(PropAtom("p"))),
            ("p & q", And(PropAtom("p"), PropAtom("q"))),
            ("K_i p", Know("i", PropAtom("p"))),
            ("~K_i ~p", Not(Know("i", Not(PropAtom("p"))))),
            ("(att_i = 2)", AttEq("i", 2)),
            ("(att_i < 3)", AttLess("i", 3)),
            ("(att_i >= 1)", att_geq("i", 1)),
            ("(att_i > 1)", att_gt("i", 1)),
            ("F", bot()),
            ("p | q", or_(PropAtom("p"), PropAtom("q"))),
            ("p -> q", implies(PropAtom("p"), PropAtom("q"))),
            ("p <-> q", iff(PropAtom("p"), PropAtom("q"))),
        ],
    )
    def test_surface_forms(self, text, ast):
        assert parse_formula(SIG, text) == ast

    def test_negation_binds_tighter_than_conjunction(self):
        assert parse_formula(SIG, "~p & q") == And(Not(PropAtom("p")), PropAtom("q"))

    def test_knowledge_binds_tighter_than_conjunction(self):
        assert parse_formula(SIG, "K_i p & q") == And(
            Know("i", PropAtom("p")), PropAtom("q")
        )

    def test_conjunction_associates_left(self):
        assert parse_formula(SIG, "p & q & p") == And(
            And(PropAtom("p"), PropAtom("q")), PropAtom("p")
        )

    def test_mixed_and_or_associate_left_at_one_level(self):
        assert parse_formula(SIG, "p & q | p") == or_(
            And(PropAtom("p"), PropAtom("q")), PropAtom("p")
        )

    def test_implication_associates_right(self):
        assert parse_formula(SIG, "p -> q -> p") == implies(
            PropAtom("p"), implies(PropAtom("q"), PropAtom("p"))
        )

    def test_implication_binds_looser_than_conjunction(self):
        assert parse_formula(SIG, "p & q -> p") == implies(
            And(PropAtom("p"), PropAtom("q")), PropAtom("p")
        )

    def test_parentheses_override(self):
        assert parse_formula(SIG, "p & (q | p)") == And(
            PropAtom("p"), or_(PropAtom("q"), PropAtom("p"))
        )

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "p &",
            "& p",
            "(p",
            "p)",
            "r",
            "K_z p",
            "(att_z = 1)",
            "(att_i = )",
            "(att_i 1)",
            "p q",
            "K_i",
            "~",
            "p # q",
        ],
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(SIG, text)

    def test_rejects_attention_value_over_bound(self):
        with pytest.raises(FormulaSyntaxError) as info:
            parse_formula(SIG, "(att_i = 4)")
        assert "exceeds the bound 3" in str(info.value)
        assert info.value.position is not None

    def test_rejects_attention_comparison_over_bound(self):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(SIG, "(att_i < 4)")

    def test_error_carries_position(self):
        with pytest.raises(FormulaSyntaxError) as info:
            parse_formula(SIG, "p & r")
        assert info.value.position == 4

    def test_print_then_parse_round_trips(self):
        rng = random.Random(2024)
        for _ in range(300):
            f = rand_formula(rng, SIG2, max_modal_depth=3, max_size=12)
            assert parse_formula(SIG2, format_formula(f)) == f

    def test_format_attention_atoms_parenthesized(self):
        assert format_formula(AttEq("i", 2)) == "(att_i = 2)"
        assert format_formula(AttLess("i", 1)) == "(att_i < 1)"


class TestHelpers:
    def test_and_all_left_associates_and_defaults_to_truth(self):
        p, q = PropAtom("p"), PropAtom("q")
        assert and_all([]) == TOP
        assert and_all([p]) == p
        assert and_all([p, q, p]) == And(And(p, q), p)

    def test_or_all_defaults_to_falsity(self):
        p = PropAtom("p")
        assert or_all([]) == bot()
        assert or_all([p]) == p

    def test_subformulas_counts_nodes(self):
        f = And(PropAtom("p"), Not(PropAtom("p")))
        subs = set(subformulas(f))
        assert PropAtom("p") in subs and f in subs

    def test_modal_depth(self):
        p = PropAtom("p")
        assert modal_depth(p) == 0
        assert modal_depth(Know("a", Know("b", p))) == 2
        assert modal_depth(And(Know("a", p), p)) == 1

    def test_validate_formula_flags_unknown_names(self):
        with pytest.raises(FormulaValidationError):
            validate_formula(SIG, PropAtom("zz"))
        with pytest.raises(FormulaValidationError):
            validate_formula(SIG, Know("zz", TOP))
        with pytest.raises(FormulaValidationError):
            validate_formula(SIG, AttEq("i", 99))
        validate_formula(SIG, Know("i", AttEq("i", 3)))


class TestProver:
    def test_propositional_basics(self):
        p, q = PropAtom("p"), PropAtom("q")
        assert is_valid(SIG2, or_(p, Not(p)))
        assert not is_satisfiable(SIG2, And(p, Not(p)))
        assert is_satisfiable(SIG2, And(p, Not(q)))
        assert entails(SIG2, And(p, q), p)
        assert not entails(SIG2, p, q)

    def test_knowledge_axioms(self):
        p = PropAtom("p")
        assert is_valid(SIG2, implies(Know("a", p), p))
        assert is_valid(SIG2, implies(Know("a", p), Know("a", Know("a", p))))
        assert is_valid(
            SIG2, implies(Not(Know("a", p)), Know("a", Not(Know("a", p))))
        )
        assert is_valid(
            SIG2,
            implies(
                And(Know("a", implies(p, PropAtom("q"))), Know("a", p)),
                Know("a", PropAtom("q")),
            ),
        )
        assert not is_valid(SIG2, implies(p, Know("a", p)))
        assert not is_valid(SIG2, implies(Know("a", p), Know("b", p)))

    def test_budget_atoms_partition_the_range(self):
        assert is_valid(SIG2, or_all([AttEq("a", n) for n in range(3)]))
        assert is_valid(SIG2, Not(And(AttEq("a", 0), AttEq("a", 1))))
        assert not is_satisfiable(SIG2, And(AttLess("a", 1), AttEq("a", 1)))
        assert is_satisfiable(SIG2, And(AttLess("a", 2), AttEq("a", 1)))
        assert is_valid(SIG2, Not(AttLess("a", 0)))

    def test_budget_atoms_are_introspective(self):
        assert is_valid(SIG2, implies(AttEq("a", 1), Know("a", AttEq("a", 1))))
        assert is_valid(SIG2, implies(AttLess("a", 2), Know("a", AttLess("a", 2))))
        assert not is_valid(SIG2, implies(AttEq("a", 1), Know("b", AttEq("a", 1))))

    def test_budget_comparisons_cohere(self):
        assert is_valid(SIG2, implies(AttEq("a", 0), AttLess("a", 1)))
        assert is_valid(SIG2, implies(AttEq("a", 2), Not(AttLess("a", 2))))
        assert entails(SIG2, att_gt("a", 0), att_geq("a", 1))

    def test_nested_modalities(self):
        p = PropAtom("p")
        f = Know("a", or_(Know("b", p), Not(Know("b", p))))
        assert is_valid(SIG2, f)
        assert is_satisfiable(SIG2, And(Know("a", p), Not(Know("b", p))))
