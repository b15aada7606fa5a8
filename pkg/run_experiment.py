from core.sbm_generator import SbmSpec, generate_sbm
from core.sage_model import save_model
from core.trainer import TrainConfig, evaluate, train
from storage import GraphStore
from utils.global_config import GlobalConfig
from utils.logging_config import setup_logging
import shutil
from datetime import datetime, UTC
from pathlib import Path
def setup_directories():
    # Experiment output lives next to run_experiment.py
    base_dir = Path(__file__).parent
    output_dir = base_dir / 'output'
    output_dir.mkdir(parents=True, exist_ok=True)
    return base_dir, output_dir
def main():
    base_dir, output_dir = setup_directories()
    config = GlobalConfig(base_dir / 'config.ini')
    logger = setup_logging(base_dir, config, session_name="experiment")
    current_time = datetime.now(UTC).strftime('%Y-%m-%d %H:%M:%S')
    logger.info("=" * 80)
    logger.info("SBM Training Experiment Started at UTC: %s", current_time)
    logger.info("Working directory: %s", base_dir)
    logger.info(config.get_summary())
    logger.info("=" * 80)
    seed = config.get_seed()
    store_path = output_dir / 'sbm_store'
    # A fresh store per run so the generated graph matches the seed
    if store_path.exists():
        shutil.rmtree(store_path)
    spec = SbmSpec(communities=4, nodes_per_community=250, p_in=0.05, p_out=0.002, feature_dim=16, seed=seed)
    with GraphStore(store_path, 'w', config.get_page_cache_bytes()) as store:
        counts = generate_sbm(spec, store, show_progress=True)
    logger.info("Generated %d nodes and %d edges", counts['nodes_loaded'], counts['edges_loaded'])
    cfg = TrainConfig.from_config(config, seed=seed)
    with GraphStore(store_path, 'r', config.get_page_cache_bytes()) as store:
        outcome = train(store, cfg, metrics_path=output_dir / 'metrics.csv', show_progress=True)
        accuracy = evaluate(store, outcome['model'], outcome['held_out'], cfg)
    save_model(outcome['model'], output_dir / 'model.npz')
    logger.info("=" * 80)
    for index, report in enumerate(outcome['epochs']):
        logger.info("Epoch %d: loss %.4f, %.1f ms/batch", index, report['loss'], report['avg_batch_time'] * 1000)
    logger.info("Held-out accuracy: %.4f over %d nodes (chance %.2f)", accuracy, len(outcome['held_out']),
                1.0 / spec.communities)
    logger.info("Metrics: %s", output_dir / 'metrics.csv')
    logger.info("=" * 80)
if __name__ == "__main__":
    main()
