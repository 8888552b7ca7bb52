from pathlib import Path

import pytest

import softcore

ROOT = Path(__file__).resolve().parents[2]
EXAMPLE1 = (ROOT / "instances/wcnf/example1.wcnf").read_text()
EXAMPLE3 = (ROOT / "instances/wcnf/example3.wcnf").read_text()
MICRO02 = (ROOT / "instances/micro/micro02.rcp").read_text()


@pytest.mark.parametrize("algorithm", ["bnb", "wpm1", "msu3"])
def test_example1_optimum(algorithm):
    r = softcore.solve_wcnf(EXAMPLE1, algorithm)
    assert r["status"] == "optimal"
    assert r["z"] == 1
    assert r["model"] == [-1, 2, 3]


def test_example3_wpm1_cores():
    r = softcore.solve_wcnf(EXAMPLE3, "wpm1")
    assert r["cores"][:2] == [[0, 2, 4], [0, 1, 2, 3, 5, 6]]
    assert r["z"] == 2 == r["lower_bound"]


def test_counter_encoding_matches():
    assert softcore.solve_wcnf(EXAMPLE3, "bnb", pb_encoding="counter")["z"] == 2


def test_oracle_and_core_check():
    assert softcore.brute_force_maxsat(EXAMPLE1) == 1
    assert softcore.verify_core(EXAMPLE1, [0, 1, 3])
    assert not softcore.verify_core(EXAMPLE1, [0, 1])


def test_oracle_refuses_large_instances():
    text = "p wcnf 23 1 10\n1 23 0\n"
    with pytest.raises(softcore.OracleRefused):
        softcore.brute_force_maxsat(text)


def test_errors():
    with pytest.raises(ValueError):
        softcore.solve_wcnf("p wcnf 2 1 10\n10 1 2\n")
    with pytest.raises(ValueError):
        softcore.solve_wcnf(EXAMPLE1, "dpll")


def test_rcpsp_schedule():
    l = softcore.exact_makespan(MICRO02)
    assert l >= softcore.makespan_lower_bound(MICRO02)
    r = softcore.solve_rcpsp(MICRO02, alpha="0.9", mode="weighted", algorithm="wpm1")
    assert r["l"] == l
    assert r["status"] == "optimal"
    assert len(r["starts"]) > 0
    again = softcore.solve_rcpsp(MICRO02, alpha="0.9", mode="weighted", algorithm="msu3")
    assert again["z"] == r["z"]


def test_splitmix64():
    assert softcore.splitmix64(0, 0) == 0xE220A8397B1DCDAF
