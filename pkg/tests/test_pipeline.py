
import pytest

from cadshrink import CadShrinkError, cost, eval_to_core, parse, to_text
from cadshrink.ast import Binop, ListExpr, Num, Sphere, Unsort, Permutation
from cadshrink.pipeline import Config, PerturbOptions, perturb, shrink, validate

from conftest import WHEEL_IDEAL, WHEEL_OBFUSCATED, WHEEL_TARGET
from oracle_geometry import sampled_equiv


def flatten_union(e):
    if isinstance(e, Binop) and e.kind == "Union":
        return flatten_union(e.lhs) + flatten_union(e.rhs)
    return [e]


def test_shrink_trivial_input_is_identity():
    e = parse("(Sphere 1)")
    out, rep = shrink(e)
    assert out == e
    assert rep.output_cost == rep.input_cost == 2
    assert rep.stop_reason == "saturated"


def test_shrink_rejects_inverse_input():
    with pytest.raises(CadShrinkError):
        shrink(Unsort(Permutation((0, 1)), ListExpr((Sphere(Num(1)), Sphere(Num(2))))))


def test_validate_definitional():
    target = parse(WHEEL_TARGET)
    flat = eval_to_core(target)
    assert validate(flat, target, 1e-6)


def test_validate_catches_deleted_component():
    flat = eval_to_core(parse(WHEEL_TARGET))
    items = flatten_union(flat)
    broken = items[0]
    for e in items[1:-1]:  # drop one spoke
        broken = Binop("Union", broken, e)
    assert not validate(broken, parse(WHEEL_TARGET), 1e-6)
    assert not sampled_equiv(broken, flat)  # independent oracle agrees


def test_perturb_all_options_off_is_identity():
    e = eval_to_core(parse(WHEEL_IDEAL))
    assert perturb(e, seed=5, options=PerturbOptions.none()) == e


def test_perturb_shuffle_preserves_chain_multiset():
    e = eval_to_core(parse(WHEEL_IDEAL))
    opts = PerturbOptions(False, False, False, True, 0.0)
    for seed in range(5):
        p = perturb(e, seed=seed, options=opts)
        assert sorted(map(to_text, flatten_union(p))) == sorted(
            map(to_text, flatten_union(e))
        )


def test_perturb_is_deterministic_in_seed():
    e = eval_to_core(parse(WHEEL_IDEAL))
    a = perturb(e, seed=123)
    b = perturb(e, seed=123)
    c = perturb(e, seed=124)
    assert a == b
    assert a != c


def test_perturb_obfuscates_into_wheel_family():
    e = eval_to_core(parse(WHEEL_IDEAL))
    p = perturb(e, seed=2)
    assert p != e
    assert validate(e, p, 1e-6)  # still the same shape
    texts = to_text(p)
    # at least one identity dropped or equivalence-swap applied somewhere
    assert "Rotate [0, 0, 0]" not in texts or "Scale [-1, -1, 1]" in texts


def test_perturbed_validates_at_jitter_scaled_eps():
    e = eval_to_core(parse(WHEEL_IDEAL))
    p = perturb(e, seed=9, options=PerturbOptions(jitter=1e-5))
    assert validate(e, p, max(1e-6, 1e-5 * 50))


def test_shrink_wheel_ideal_hits_target_shape():
    out, rep = shrink(eval_to_core(parse(WHEEL_IDEAL)))
    assert rep.stop_reason == "saturated"
    assert cost(out) == cost(parse(WHEEL_TARGET))
    assert validate(eval_to_core(parse(WHEEL_IDEAL)), out, 1e-6)
    assert "(Tabulate (i 6)" in to_text(out)
    assert "60*i" in to_text(out)


def test_shrink_reports_are_deterministic():
    e = eval_to_core(parse(WHEEL_OBFUSCATED))
    out1, rep1 = shrink(e)
    out2, rep2 = shrink(e)
    assert out1 == out2
    r1, r2 = rep1.to_json(), rep2.to_json()
    r1.pop("wall_seconds")
    r2.pop("wall_seconds")
    assert r1 == r2


def test_output_cost_never_exceeds_input(corpus_dir):
    for f in sorted(corpus_dir.glob("*.csexp"))[:6]:
        e = eval_to_core(parse(f.read_text()))
        out, rep = shrink(e)
        assert rep.output_cost <= rep.input_cost
        assert validate(e, out, 1e-6)


def test_report_json_schema():
    out, rep = shrink(parse("(Union (Sphere 1) (Sphere 2))"))
    payload = rep.to_json()
    assert set(payload) == {
        "input_cost",
        "output_cost",
        "iterations",
        "enodes",
        "eclasses",
        "stop_reason",
        "wall_seconds",
    }
    rep.validated = True
    assert rep.to_json()["validated"] is True


def test_ablation_configs_change_outcome():
    e = eval_to_core(parse(WHEEL_OBFUSCATED))
    full, _ = shrink(e)
    noinv, _ = shrink(e, Config(inverse_rules=False))
    nocad, _ = shrink(e, Config(cad_rules=False))
    assert cost(full) < cost(noinv)
    assert cost(full) < cost(nocad)
