import json
import random
import subprocess
import sys

import pytest

from bccradio.bcc import build_greedy, parse_codebook
from bccradio.channel import diameter, is_connected, parse_scripted, parse_topology
from bccradio.harness import (
    ConfigError,
    RotatingPath,
    SpanningTreeReshuffler,
    StaticWrapper,
    config_from_dict,
    generate_topology,
    make_provider,
    records_csv,
    run_batch,
)
from bccradio.harness.cli import main
from bccradio.harness.topologies import complete


def base(**kw):
    cfg = {"protocol": "local_full", "n": 8, "a": 2, "ell": 8,
           "topology": {"kind": "complete"}, "senders": {"random": 2},
           "seeds": {"count": 1, "master": 3}}
    cfg.update(kw)
    return cfg


# -- topologies ---------------------------------------------------

def test_generators():
    rng = random.Random(0)
    assert generate_topology({"kind": "complete"}, 4, rng).num_edges == 6
    g = generate_topology({"kind": "grid", "width": 3, "height": 3}, 9, rng)
    assert diameter(g) == 4
    assert diameter(generate_topology({"kind": "path"}, 5, rng)) == 4
    assert generate_topology({"kind": "star"}, 5, rng).num_edges == 4


def test_random_connected_reproducible():
    spec = {"kind": "random_connected", "p": 0.2}
    a = generate_topology(spec, 20, random.Random(42))
    b = generate_topology(spec, 20, random.Random(42))
    assert a == b and is_connected(a)


def test_bad_topology_specs():
    from bccradio.harness.topologies import TopologySpecError

    with pytest.raises(TopologySpecError, match="p"):
        generate_topology({"kind": "random_connected"}, 5, random.Random(0))
    with pytest.raises(TopologySpecError, match="kind"):
        generate_topology({"kind": "torus"}, 5, random.Random(0))
    with pytest.raises(TopologySpecError):
        generate_topology({"kind": "grid", "width": 2, "height": 2}, 5, random.Random(0))


def test_static_wrapper_constant():
    w = StaticWrapper(complete(5))
    assert all(w.topology(r, None) == complete(5) for r in range(20))


def test_rotating_path_is_hamiltonian():
    rp = RotatingPath(4)
    for r in range(8):
        t = rp.topology(r, None)
        assert t.num_edges == 3 and is_connected(t)
        assert max(len(t.neighbors(u)) for u in range(4)) <= 2


def test_reshuffler_connected_for_1000_rounds():
    rs = SpanningTreeReshuffler(10, random.Random(7))
    graphs = [rs.topology(r, None) for r in range(1000)]
    assert all(is_connected(t) and t.num_edges == 9 for t in graphs)
    assert len({tuple(t.edges()) for t in graphs}) > 1


def test_make_provider_dynamic():
    p = make_provider({"kind": "dynamic", "adversary": "rotating_path"}, 6, random.Random(0))
    assert p.topology(0, None).n == 6


# -- config ---------------------------------------------------

@pytest.mark.parametrize("field", ["protocol", "n", "topology"])
def test_missing_required_field_named(field):
    raw = base()
    del raw[field]
    with pytest.raises(ConfigError, match=f"'{field}'"):
        config_from_dict(raw)


@pytest.mark.parametrize("patch,field", [
    ({"bogus": 1}, "bogus"),
    ({"n": -2}, "n"),
    ({"protocol": "gossip"}, "protocol"),
    ({"a": None}, "a"),
    ({"N": 10**9}, "N"),
    ({"senders": {"ids": [0, 0]}}, "senders.ids"),
    ({"constants": {"c9": 1}}, "constants.c9"),
    ({"seeds": {"count": 0}}, "seeds.count"),
])
def test_bad_config_names_field(patch, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        config_from_dict(base(**patch))


def test_estimation_needs_d_bound():
    with pytest.raises(ConfigError, match="d_bound"):
        config_from_dict(base(protocol="estimation"))


# -- batches ---------------------------------------------------

def test_batch_local_full_always_succeeds():
    records, summary = run_batch(config_from_dict(base(seeds={"count": 5, "master": 1})))
    assert summary["success_fraction"] == 1.0
    assert all(r.a_prime == 2 for r in records)


def test_batch_csv_byte_identical():
    cfg = config_from_dict(base())
    assert records_csv(run_batch(cfg)[0]) == records_csv(run_batch(cfg)[0])


def test_batch_workers_preserve_order():
    cfg = config_from_dict({
        "protocol": "rlnc", "n": 12, "a": 3, "ell": 4, "N": 16,
        "topology": {"kind": "random_connected", "p": 0.3},
        "senders": {"random": 3}, "seeds": {"count": 6, "master": 9}})
    serial = records_csv(run_batch(cfg)[0])
    assert records_csv(run_batch(cfg, workers=3)[0]) == serial
    rows = serial.splitlines()[1:]
    assert len(rows) == 6 and all("decode_rounds" in r for r in rows)


def test_batch_multihop_respects_contention():
    cfg = config_from_dict({
        "protocol": "local_multihop", "n": 9, "a": 1, "ell": 2,
        "topology": {"kind": "grid", "width": 3, "height": 3},
        "senders": {"random": 2}, "seeds": {"count": 4, "master": 0}})
    records, _ = run_batch(cfg)
    assert all(json.loads(r.row()[-1])["neighborhood_contention"] <= 1 for r in records)


def test_batch_rlnc_after_estimation():
    cfg = config_from_dict({
        "protocol": "rlnc_after_estimation", "n": 10, "ell": 6, "d_bound": 9,
        "topology": {"kind": "path"}, "senders": {"ids": [1, 4, 8]},
        "seeds": {"count": 2, "master": 5}})
    records, summary = run_batch(cfg)
    assert summary["successes"] == 2
    assert all(json.loads(r.row()[-1])["packet_width"] == 9 for r in records)


# -- CLI ---------------------------------------------------

def write_cfg(tmp_path, raw, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(raw))
    return str(p)


def test_cli_codegen(tmp_path, capsys):
    out = tmp_path / "cb.txt"
    assert main(["codegen", "--M", "16", "--a", "2", "--construction", "greedy",
                 "--out", str(out)]) == 0
    code = parse_codebook(out.read_text())
    assert out.read_text().splitlines()[0] == f"16 {build_greedy(16, 2).m} 2 greedy"
    assert code == build_greedy(16, 2)


def test_cli_simulate_ok(tmp_path, capsys):
    cfg = write_cfg(tmp_path, base())
    tr = tmp_path / "t.log"
    assert main(["simulate", "--config", cfg, "--protocol", "local_full",
                 "--transcript", str(tr)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["success"] is True and rec["protocol"] == "local_full"
    assert tr.read_text().startswith("round 0 node")


def test_cli_missing_field(tmp_path, capsys):
    raw = base()
    del raw["topology"]
    assert main(["simulate", "--config", write_cfg(tmp_path, raw)]) != 0
    assert "topology" in capsys.readouterr().err


def test_cli_override_names_field(tmp_path, capsys):
    assert main(["simulate", "--config", write_cfg(tmp_path, base()), "--n", "0"]) != 0
    assert "'n'" in capsys.readouterr().err


def test_cli_bench_csv(tmp_path):
    out = tmp_path / "m.csv"
    cfg = write_cfg(tmp_path, base())
    assert main(["bench", "--config", cfg, "--seeds", "3", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["bench", "--config", cfg, "--seeds", "3", "--out", str(out)]) == 0
    assert out.read_bytes() == first
    assert first.decode().splitlines()[0].startswith("seed,protocol,n,N,a,a_prime")


def test_cli_estimate(tmp_path, capsys):
    raw = {"n": 8, "d_bound": 7, "topology": {"kind": "path"}, "senders": {"ids": [2, 5]}}
    assert main(["estimate", "--config", write_cfg(tmp_path, raw), "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["success"] and out["sender_sets"] == [[2, 5]] * 8


def test_cli_topo(tmp_path, capsys):
    assert main(["topo", "--kind", "grid", "--width", "3", "--height", "2"]) == 0
    t = parse_topology(capsys.readouterr().out)
    assert t.n == 6 and t.num_edges == 7
    assert main(["topo", "--kind", "dynamic", "--adversary", "spanning_tree", "--n", "5",
                 "--rounds", "4"]) == 0
    graphs = parse_scripted(capsys.readouterr().out)
    assert len(graphs) == 4 and all(is_connected(g) for g in graphs)
    assert main(["topo", "--kind", "random_connected", "--n", "5"]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bccradio", "codegen", "--M", "7", "--a", "1"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.splitlines()[0] == "7 3 1 greedy"
