import json

import numpy as np
import pytest

from pclp.cli import main
from pclp.formats import emit_instance, emit_updates, parse_instance
from pclp.generate import random_covering, restricting_stream


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_unit_instance(tmp_path, capsys):
    path = write(tmp_path, "inst.txt", "covering 1 1 1.0\nC 0 0 1.0\n")
    code = main(["solve", path, "--eps", "0.1", "--verify"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["outcome_tag"] == "covering_primal"
    assert payload["verify_result"]["ok"]
    assert payload["schema"] == 1


def test_solve_report_written(tmp_path, capsys):
    path = write(tmp_path, "inst.txt", "covering 1 1 1.0\nC 0 0 0.4\n")
    report = tmp_path / "report.json"
    code = main(["solve", path, "--report", str(report)])
    assert code == 0
    payload = json.loads(report.read_text())
    assert payload["outcome_tag"] == "packing_dual"
    assert payload["stats"]["whacks"] == payload["stats"]["whacks"]


def test_basic_template_flag(tmp_path, capsys):
    inst = write(tmp_path, "inst.txt", "covering 1 1 1.0\nC 0 0 0.4\n")
    assert main(["solve", inst, "--basic", "--verify"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["outcome_tag"] == "packing_dual"
    pk = write(tmp_path, "p.txt", "packing 1 2 1.0\nP 0 0 1.0\nP 0 1 1.0\n")
    assert main(["packing", pk, "--basic", "--verify"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["outcome_tag"] == "packing_primal"


def test_parse_error_exits_3(tmp_path, capsys):
    path = write(tmp_path, "bad.txt", "covering 1\n")
    assert main(["solve", path]) == 3


def test_dynamic_non_monotone_stream_exits_3(tmp_path):
    inst = write(tmp_path, "inst.txt", "covering 1 1 1.0\nC 0 0 1.0\n")
    ups = write(tmp_path, "ups.txt", "set C 0 0 2.0\n")
    assert main(["dynamic", inst, "--updates", ups]) == 3


def test_dynamic_replay(tmp_path, capsys):
    inst = write(tmp_path, "inst.txt", "covering 1 1 1.0\nC 0 0 1.0\n")
    ups = write(tmp_path, "ups.txt", "set C 0 0 0.9\nset C 0 0 0.5\n")
    code = main(["dynamic", inst, "--updates", ups, "--verify"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verify_result"]["ok"]


def test_stream_and_online_commands(tmp_path, capsys):
    inst = write(tmp_path, "inst.txt", "covering 2 2 1.0\nC 0 0 1.0\nC 1 1 1.0\n")
    assert main(["stream", inst, "--mode", "primalonly"]) == 0
    capsys.readouterr()
    assert main(["online", inst]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "recourse" in payload["stats"]


def test_positive_command_with_updates(tmp_path, capsys):
    inst = write(tmp_path, "p.txt", "positive 1 1 1\nP 0 0 1.0\nC 0 0 0.4\n")
    ups = write(tmp_path, "u.txt", "set C 0 0 1.2\n")
    code = main(["positive", inst, "--eps", "0.005", "--updates", ups, "--verify"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["outcome_tag"] == "positive_solution"


def test_general_verify_gap(tmp_path, capsys):
    text = ("general 2 2\nC 0 0 1.0\nC 0 1 2.0\nC 1 0 2.0\nC 1 1 1.0\n"
            "a 0 1.0\na 1 1.0\nb 0 1.0\nb 1 1.0\n")
    inst = write(tmp_path, "g.txt", text)
    code = main(["general", inst, "--eps", "0.05", "--verify"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verify_result"]["ok"]
    assert payload["verify_result"]["opt_gap"] <= payload["verify_result"]["bound"]


def test_general_other_settings(tmp_path, capsys):
    text = ("general 2 2\nC 0 0 1.0\nC 0 1 2.0\nC 1 0 2.0\nC 1 1 1.0\n"
            "a 0 1.0\na 1 1.0\nb 0 1.0\nb 1 1.0\n")
    inst = write(tmp_path, "g.txt", text)
    ups = write(tmp_path, "g.ups", "set b 0 1.4\nset C 1 0 1.2\n")
    assert main(["general", inst, "--eps", "0.1", "--setting", "dynamic",
                 "--updates", ups]) == 0
    dyn = json.loads(capsys.readouterr().out)
    assert dyn["updates_seen"] == 2
    assert main(["general", inst, "--eps", "0.1", "--setting", "stream"]) == 0
    stm = json.loads(capsys.readouterr().out)
    assert stm["physical_passes"] >= 1
    assert main(["general", inst, "--eps", "0.1", "--setting", "online"]) == 0
    onl = json.loads(capsys.readouterr().out)
    assert onl["recourse"] >= 0 and onl["objective"] > 0


def test_gen_same_seed_byte_identical(tmp_path):
    a1 = tmp_path / "a1.txt"
    a2 = tmp_path / "a2.txt"
    for out in (a1, a2):
        assert main(["gen", "--kind", "covering", "--m", "4", "--n", "4",
                     "--seed", "9", "--out", str(out),
                     "--updates-out", str(out) + ".ups", "--tau", "20"]) == 0
    assert a1.read_bytes() == a2.read_bytes()
    assert (tmp_path / "a1.txt.ups").read_bytes() == (tmp_path / "a2.txt.ups").read_bytes()


def test_gen_streams_are_monotone(tmp_path):
    out = tmp_path / "c.txt"
    ups = tmp_path / "c.ups"
    main(["gen", "--kind", "covering", "--m", "5", "--n", "5", "--seed", "3",
          "--out", str(out), "--updates-out", str(ups), "--tau", "40"])
    inst = parse_instance(out.read_text())
    live = {(i, j): v for i, j, v in inst.C.entries()}
    from pclp.formats import parse_updates
    for line in parse_updates(ups.read_text()):
        assert line.value < live[(line.row, line.col)]
        live[(line.row, line.col)] = line.value


def test_roundtrip_parse_emit_generated(rng, tmp_path):
    inst = random_covering(rng, 6, 5, eps=0.1)
    text = emit_instance(inst)
    again = emit_instance(parse_instance(text))
    assert text == again
