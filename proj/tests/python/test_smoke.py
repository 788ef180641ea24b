import math

import pytest

import rankpref as rp


def small():
    # (0,0)=2, (0,1)=4, (1,0)=3; (1,1) missing.
    return rp.SparseRatingMatrix(2, 2, [(0, 0, 2.0), (0, 1, 4.0), (1, 0, 3.0)])


def test_matrix_roundtrip(tmp_path):
    m = small()
    assert (m.n_users, m.n_items, m.nnz) == (2, 2, 3)
    assert m.sparsity == pytest.approx(0.25)
    assert m.get(1, 1) is None and m.get(0, 1) == 4.0
    path = tmp_path / "m.csv"
    rp.write_csv(m, path)
    back = rp.load_csv(path)
    assert sorted(back.triples()) == sorted(m.triples())


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.dat"
    bad.write_text("1::1::5::0\n1::2::7::0\n")
    with pytest.raises(rp.DataError, match="line 2"):
        rp.load_movielens(bad)
    with pytest.raises(ValueError):
        rp.SparseRatingMatrix(1, 1, [(0, 0, 3.0), (0, 0, 4.0)])


def test_consistent_completion():
    m = small()
    sc, uc = rp.fit_sc(m), rp.fit_uc(m)
    assert sc.converged and uc.converged
    assert sc.predict(1, 1) == pytest.approx(5.0, abs=1e-9)
    assert uc.predict(1, 1) == pytest.approx(6.0, rel=1e-9)


def test_prediction_errors():
    m = rp.SparseRatingMatrix(2, 3, [(0, 0, 4.0), (1, 1, 2.0)])
    model = rp.fit_sc(m)
    with pytest.raises(rp.PredictionError, match="CrossComponent"):
        model.predict(0, 1)
    with pytest.raises(rp.PredictionError, match="ColdStart"):
        model.predict(0, 2)
    assert rp.connected_components(m)[0] == 3


def test_svd_model(tmp_path):
    triples = [(u, i, float(1 + (u * 3 + i * 7) % 5)) for u in range(6) for i in range(5) if (u + i) % 4]
    m = rp.SparseRatingMatrix(6, 5, triples)
    model = rp.fit_svd(m, 0.4)
    assert model.rank == 2
    s = list(model.singular_values)
    assert s == sorted(s, reverse=True)
    path = tmp_path / "svd.model"
    model.save(path)
    assert rp.SvdModel.load(path).predict(0, 0) == model.predict(0, 0)


def test_withholding_and_counting():
    triples = []
    for u in range(4):
        triples += [(u, 0, 5.0), (u, 1, 1.0), (u, 2, 3.0)]
    m = rp.SparseRatingMatrix(4, 3, triples)
    plan = rp.select_pairs(m, 5, 1, seed=7)
    assert len(plan) == 4
    assert plan.triples[0] == (0, 0, 1)
    report = rp.count_discordant([(5, 1), (1, 5), (3, 3), None], plan)
    assert (report.concordant, report.discordant, report.ties, report.skipped) == (1, 1, 1, 1)
    assert report.kendall_tau == 0.0
    assert report.as_dict()["n_pairs"] == 4


def test_experiment_and_audit(tmp_path):
    triples = []
    for u in range(30):
        for i in range(12):
            if (u * 5 + i) % 3:
                triples.append((u, i, float(1 + (u + 2 * i) % 5)))
    m = rp.SparseRatingMatrix(30, 12, triples)
    reports = rp.run_experiment(m, methods="uc,sc", gaps=[(5, 1), (5, 4)], seed=3)
    assert [r.method for r in reports] == ["UC", "SC", "UC", "SC"]
    assert all(r.n_pairs > 0 for r in reports)
    again = rp.run_experiment(m, methods="uc,sc", gaps=[(5, 1), (5, 4)], seed=3)
    assert [r.as_dict() for r in again] == [r.as_dict() for r in reports]
    for r in reports:
        assert math.isnan(r.rmse_withheld) or r.rmse_withheld >= 0

    for method in ("uc", "sc"):
        res = rp.audit_consensus_order(method, trials=200, seed=1)
        assert res["violations"] == 0 and res["trials"] == 200


def test_config_run(tmp_path):
    data = tmp_path / "r.csv"
    rows = ["user_id,item_id,rating"]
    for u in range(20):
        for i in range(10):
            if (u + i) % 3:
                rows.append(f"u{u},i{i},{1 + (u * i) % 5}")
    data.write_text("\n".join(rows) + "\n")
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("dataset = r.csv\nformat = csv\nmethods = sc\ngaps = 5,1\nout_csv = out.csv\n")
    table = rp.run_experiment_config(cfg)
    assert len(table) == 1 and table[0].method == "SC"
    assert (tmp_path / "out.csv").read_text().startswith("dataset,method,")
    bad = tmp_path / "bad.cfg"
    bad.write_text("dataset = r.csv\nbogus = 1\n")
    with pytest.raises(rp.ConfigError):
        rp.run_experiment_config(bad)
