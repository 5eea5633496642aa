import pytest

from relayplace.encode import (
    EncodingError,
    ModelSyntaxError,
    encode_lp,
    encode_opb,
    encode_smt2,
    encode_varmap,
    parse_model,
    read_varmap,
    write_instance,
)
from relayplace.model import EQ, GE, LE, Model01LP, VarRef, make_constraint, to_feasibility
from relayplace.solve import branch_and_bound, brute_force

from _support import load, pipeline
from make_goldens import GOLDEN, golden_models, one_var_model, render


def two_var(cons, objective=None):
    table = (VarRef("P", (0,), 0), VarRef("P", (1,), 1))
    return Model01LP(2, table, tuple(cons), objective)


@pytest.mark.parametrize("name", ["one_var", "line3"])
@pytest.mark.parametrize("ext", ["lp", "opb", "smt2"])
def test_golden_files_are_byte_stable(name, ext):
    m = golden_models()[name]
    assert render(m)[ext] == (GOLDEN / f"{name}.{ext}").read_text()
    assert render(golden_models()[name])[ext] == render(m)[ext]


def test_feasibility_lp_has_a_zero_objective_row():
    text = encode_lp(to_feasibility(one_var_model()))
    assert "Minimize\n obj: 0\n" in text


def test_feasibility_smt2_has_no_minimize():
    text = encode_smt2(to_feasibility(pipeline(load("line3.scn"))[2]))
    assert "(minimize" not in text and "(get-objectives)" not in text
    assert "(check-sat)" in text


def same_model(a, b):
    assert a.num_vars == b.num_vars
    assert [v.name for v in a.var_table] == [v.name for v in b.var_table]
    assert [(c.terms, c.sense, c.rhs) for c in a.constraints] == [(c.terms, c.sense, c.rhs) for c in b.constraints]
    assert a.objective == b.objective


def fixture_models():
    models = golden_models()
    models["line3_feas"] = to_feasibility(models["line3"])
    models["line3_budget"] = to_feasibility(models["line3"], 6)
    s = load("synth_tiny_seed1.scn").with_params(rho=0.5, fault_tolerance=0)
    models["tiny"] = pipeline(s)[2]
    models["airfield"] = pipeline(load("airfield10.scn").with_params(rho=0.4))[2]
    return models


@pytest.mark.parametrize("name", sorted(fixture_models()))
def test_lp_round_trip(name):
    m = fixture_models()[name]
    back = parse_model(encode_lp(m), "lp")
    same_model(m, back)
    assert [c.family for c in back.constraints] == [c.family for c in m.constraints]


@pytest.mark.parametrize("name", sorted(fixture_models()))
def test_opb_round_trip_preserves_solutions(name):
    m = fixture_models()[name]
    varmap = {v.name: v.column for v in m.var_table}
    back = parse_model(encode_opb(m), "opb", varmap)
    assert back.num_vars == m.num_vars
    assert [v.name for v in back.var_table] == [v.name for v in m.var_table]
    assert back.is_feasibility == m.is_feasibility
    if m.num_vars <= 21:
        a, b = brute_force(m), brute_force(back)
        assert a.status == b.status and a.objective == pytest.approx(b.objective, abs=1e-9)


def test_opb_le_row_is_negated():
    m = two_var([make_constraint([(1, 0), (1, 1)], LE, 1, "link_once")])
    assert encode_opb(m).splitlines()[2] == "-1 x1 -1 x2 >= -1 ;"


def test_opb_equality_is_split_in_two():
    m = two_var([make_constraint([(1, 0)], EQ, 1, "flow_exit")])
    lines = encode_opb(m).splitlines()
    assert lines[0] == "* #variable= 2 #constraint= 2"
    assert lines[2:] == ["+1 x1 >= 1 ;", "-1 x1 >= -1 ;"]


def test_opb_rejects_fractional_rows():
    m = two_var([make_constraint([(0.5, 0)], GE, 1, "x")])
    with pytest.raises(EncodingError):
        encode_opb(m)


def test_opb_fractional_objective_is_scaled_and_read_back():
    m = two_var([make_constraint([(1, 0), (1, 1)], GE, 1, "x")], ((2.5, 0), (0.25, 1)))
    text = encode_opb(m)
    assert "min: +25000 x1 +2500 x2 ;" in text
    back = parse_model(text, "opb")
    assert back.objective == ((2.5, 0), (0.25, 1))
    assert brute_force(back).objective == 0.25


def test_smt2_fractional_objective_is_scaled():
    m = two_var([make_constraint([(1, 0), (1, 1)], GE, 1, "x")], ((2.5, 0), (0.25, 1)))
    text = encode_smt2(m)
    assert "; objective_scale 10000" in text
    assert "(minimize (+ (* 25000 p_v0) (* 2500 p_v1)))" in text


def test_opb_without_min_is_a_feasibility_model():
    m = parse_model("* #variable= 2 #constraint= 1\n+1 x1 +1 x2 >= 1 ;\n", "opb")
    assert m.is_feasibility and m.num_vars == 2 and len(m.constraints) == 1


def test_malformed_opb_term_reports_its_line():
    text = "* #variable= 1 #constraint= 1\nmin: +1 x1 ;\n++1 x1 >= 1 ;\n"
    with pytest.raises(ModelSyntaxError) as err:
        parse_model(text, "opb")
    assert err.value.line == 3


@pytest.mark.parametrize(
    "text",
    [
        "Minimize\n obj: x\nSubject To\n c: x + y >=\nBinary\n x y\nEnd\n",
        "Minimize\n obj: x\nSubject To\n c: 0.5 x >= 1\nBinary\n x\nEnd\n",
        "Minimize\n obj: x\nSubject To\n c: x >= 1\nGeneral\n x\nEnd\n",
    ],
)
def test_lp_errors(text):
    with pytest.raises(ModelSyntaxError):
        parse_model(text, "lp")


def test_lp_accepts_attached_signs_and_hand_written_files():
    text = "\\ hand written\nMinimize\n obj: 2 a + b\nSubject To\n c1: -1 a - b >= -1\n c2: a + b >= 1\nBinary\n a b\nEnd\n"
    m = parse_model(text, "lp")
    assert m.num_vars == 2
    res = branch_and_bound(m)
    assert res.objective == 1 and res.assignment == {0: 0, 1: 1}


def test_long_rows_wrap():
    _, _, m = pipeline(load("synth_tiny_seed1.scn").with_params(rho=0.5))
    assert max(len(line) for line in encode_lp(m).splitlines()) <= 255


def test_varmap_and_write_instance(tmp_path):
    m = golden_models()["line3"]
    assert read_varmap(encode_varmap(m)) == {v.name: v.column for v in m.var_table}
    paths = write_instance(m, tmp_path / "line3", ["lp", "opb"])
    assert sorted(p.name for p in paths) == ["line3.lp", "line3.opb", "line3.varmap.csv"]
    assert (tmp_path / "line3.lp").read_text() == (GOLDEN / "line3.lp").read_text()
