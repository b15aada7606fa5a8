# tests/test_trainer.py
import pandas as pd
import pytest
from core.errors import InitError
from core.sage_model import init_model
from core.sampler import fetch_metadata
from core.trainer import (METRIC_COLUMNS, TrainConfig, batch_seed, epoch_batches, evaluate, list_node_ids,
                          split_holdout, train, train_epoch, write_metrics)
from utils.global_config import GlobalConfig
def small_config(**overrides):
    values = dict(epochs=2, batch_size=16, fanouts=[3, 3], hidden_dim=8, lr=0.1, seed=1)
    values.update(overrides)
    return TrainConfig(**values)
class TestSplits:
    def test_holdout_is_disjoint_and_covering(self):
        ids = list(range(100))
        train_ids, held_out = split_holdout(ids, 0.2, seed=3)
        assert len(held_out) == 20
        assert sorted(train_ids + held_out) == ids
        assert split_holdout(ids, 0.2, seed=3) == (train_ids, held_out)
    def test_holdout_fraction_range(self):
        with pytest.raises(ValueError):
            split_holdout([1, 2], 1.0, seed=0)
    def test_batches_cover_every_seed_once(self):
        batches = epoch_batches(list(range(50)), 16, seed=0, epoch=0)
        assert [len(seeds) for _, seeds in batches] == [16, 16, 16, 2]
        assert sorted(s for _, seeds in batches for s in seeds) == list(range(50))
        assert [index for index, _ in batches] == [0, 1, 2, 3]
    def test_oversized_batch_gives_one_batch(self):
        batches = epoch_batches(list(range(10)), 512, seed=0, epoch=0)
        assert len(batches) == 1 and len(batches[0][1]) == 10
    def test_epochs_reshuffle(self):
        ids = list(range(40))
        assert epoch_batches(ids, 40, 0, 0) != epoch_batches(ids, 40, 0, 1)
    def test_workers_split_one_shuffle(self):
        ids = list(range(30))
        whole = epoch_batches(ids, 30, seed=2, epoch=0)[0][1]
        parts = [epoch_batches(ids, 15, seed=2, epoch=0, num_workers=2, worker=w) for w in range(2)]
        assert parts[0][0][0] == 0 and parts[1][0][0] == 1
        assert sorted(parts[0][0][1] + parts[1][0][1]) == sorted(whole)
        assert parts[0][0][1] == whole[0::2]
    def test_batch_seed_depends_on_every_input(self):
        seeds = {batch_seed(0, 0, 0), batch_seed(1, 0, 0), batch_seed(0, 1, 0), batch_seed(0, 0, 1)}
        assert len(seeds) == 4
        assert batch_seed(5, 6, 7) == batch_seed(5, 6, 7)
class TestTraining:
    def test_loss_decreases_on_separable_sbm(self, sbm_store):
        outcome = train(sbm_store, small_config(epochs=3))
        losses = [report['loss'] for report in outcome['epochs']]
        assert losses[-1] < losses[0]
        assert outcome['status'] == 'success'
        assert len(outcome['train_ids']) == 64 and len(outcome['held_out']) == 16
    def test_epoch_reports_sample_sizes(self, sbm_store):
        cfg = small_config(batch_size=1000)
        model = init_model(fetch_metadata(sbm_store, 'PAPER'), cfg.hidden_dim, 2, cfg.seed)
        report = train_epoch(sbm_store, model, cfg, list_node_ids(sbm_store, 'PAPER'))
        assert report['batches'] == 1
        assert report['sampled_nodes'] >= 80
        assert [r['batch'] for r in report['records']] == [0]
    def test_training_replays_bit_for_bit(self, sbm_store):
        first = train(sbm_store, small_config(epochs=1))
        second = train(sbm_store, small_config(epochs=1))
        assert first['model'].digest() == second['model'].digest()
    def test_chained_strategy_trains(self, sbm_store):
        outcome = train(sbm_store, small_config(epochs=1, strategy='per-hop-chained', fanouts=[2, 2, 2]))
        assert outcome['model'].num_layers == 3
    def test_cancel_from_progress_callback(self, sbm_store):
        outcome = train(sbm_store, small_config(epochs=1), progress_callback=lambda done, total: False)
        assert outcome['epochs'][0]['batches'] == 1
    def test_evaluate_is_deterministic(self, sbm_store):
        cfg = small_config(epochs=1)
        outcome = train(sbm_store, cfg)
        first = evaluate(sbm_store, outcome['model'], outcome['held_out'], cfg)
        second = evaluate(sbm_store, outcome['model'], outcome['held_out'], cfg)
        assert first == second
        assert 0.0 <= first <= 1.0
        assert evaluate(sbm_store, outcome['model'], [], cfg) == 0.0
    def test_missing_node_type(self, sbm_store):
        with pytest.raises(InitError):
            train(sbm_store, small_config(node_type='AUTHOR'))
    def test_metrics_file(self, sbm_store, tmp_path):
        outcome = train(sbm_store, small_config(epochs=1), metrics_path=tmp_path / 'out' / 'metrics.csv')
        frame = pd.read_csv(tmp_path / 'out' / 'metrics.csv')
        assert list(frame.columns) == METRIC_COLUMNS
        assert len(frame) == len(outcome['records']) == 4
def test_write_metrics_empty(tmp_path):
    path = write_metrics([], tmp_path / 'metrics.csv')
    assert list(pd.read_csv(path).columns) == METRIC_COLUMNS
def test_config_from_file(tmp_path):
    ini = tmp_path / 'config.ini'
    ini.write_text("[Training]\nepochs = 3\nfanouts = 5,4\nstrategy = per-hop-chained\n", encoding='utf-8')
    cfg = TrainConfig.from_config(GlobalConfig(ini, persist=False), seed=9)
    assert (cfg.epochs, cfg.fanouts, cfg.strategy, cfg.seed) == (3, [5, 4], 'per-hop-chained', 9)
    assert cfg.sampling().fanouts == [5, 4]
@pytest.mark.slow
def test_trained_model_beats_chance(sbm_store):
    cfg = small_config(epochs=20)
    outcome = train(sbm_store, cfg)
    assert evaluate(sbm_store, outcome['model'], outcome['held_out'], cfg) > 0.8
