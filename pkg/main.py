# main.py
"""
Graph Training DB command line.

    python main.py [--config FILE] [--seed N] [--log-level LEVEL] [--page-cache-mib MIB] <command> ...

Exit codes: 0 success, 1 user error (message on stderr), 2 internal error
(traceback written to a crash log next to the session log).
"""
import argparse
import json
import sys
import logging
import traceback
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional
from colorama import Fore, Style, init as colorama_init
from storage import CorruptStore, GraphStore, StorageError
from query import QueryEngine, QueryError, format_value
from query.errors import ExecutionError
from query.profiler import format_table
from core.errors import GraphTrainingError
from utils.global_config import GlobalConfig, parse_int_list
from utils.logging_config import setup_logging
logger = logging.getLogger(__name__)
EXIT_OK = 0
EXIT_USER = 1
EXIT_INTERNAL = 2
class UsageError(Exception):
    pass
class CliParser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit 1 instead of exiting itself"""
    def error(self, message):
        raise UsageError(f"{message}\n\n{self.format_usage()}")
def _warn(message: str):
    print(f"{Fore.YELLOW}{message}{Style.RESET_ALL}", file=sys.stderr)
def _fail(message: str):
    print(f"{Fore.RED}error: {message}{Style.RESET_ALL}", file=sys.stderr)
def build_parser() -> CliParser:
    parser = CliParser(prog='gtdb', description='Embedded graph database with GraphSAGE training')
    parser.add_argument('--config', type=Path, help='config.ini path (created with defaults if missing)')
    parser.add_argument('--seed', type=int, help='global PRNG seed (overrides GTDB_SEED and config)')
    parser.add_argument('--log-level', help='console log level')
    parser.add_argument('--page-cache-mib', type=float, help='page cache size in MiB')
    commands = parser.add_subparsers(dest='command', parser_class=CliParser)
    ingest = commands.add_parser('ingest', help='bulk load node and edge CSV files')
    ingest.add_argument('--store', type=Path)
    ingest.add_argument('--nodes', action='append', default=[], metavar='PATH:LABEL')
    ingest.add_argument('--edges', action='append', default=[], metavar='PATH:TYPE[:SRC_LABEL:DST_LABEL]')
    ingest.add_argument('--feature-dim', type=int, default=0)
    ingest.add_argument('--id-column', default='id')
    sbm = commands.add_parser('gen-sbm', help='generate a stochastic block model graph into a store')
    sbm.add_argument('--store', type=Path)
    sbm.add_argument('--communities', type=int, default=4)
    sbm.add_argument('--per-community', '--nodes-per-community', dest='nodes_per_community', type=int, default=250)
    sbm.add_argument('--p-in', type=float, default=0.05)
    sbm.add_argument('--p-out', type=float, default=0.002)
    sbm.add_argument('--dim', '--feature-dim', dest='feature_dim', type=int, default=16)
    sbm.add_argument('--noise', type=float, default=1.0)
    query = commands.add_parser('query', help='run a query file or inline query text')
    query.add_argument('--store', type=Path)
    mode = query.add_mutually_exclusive_group()
    mode.add_argument('--profile', action='store_true')
    mode.add_argument('--explain', action='store_true')
    query.add_argument('--param', action='append', default=[], metavar='NAME=JSON')
    query.add_argument('--table', action='store_true', help='boxed table instead of tab-separated rows')
    query.add_argument('query', help="path of a query file, '-' for stdin, or the query text")
    dist = commands.add_parser('sample-dist', help='sampled-node histogram against two-hop path counts')
    dist.add_argument('--store', type=Path)
    dist.add_argument('--seeds', type=Path, required=True, help='file with one seed id per line')
    dist.add_argument('--max', type=int, default=None)
    dist.add_argument('--runs', type=int, default=100)
    dist.add_argument('--out', type=Path, required=True)
    for name, help_text in (('train', 'train a GraphSAGE model'), ('train-dist', 'train with several workers')):
        train = commands.add_parser(name, help=help_text)
        train.add_argument('--store', type=Path)
        train.add_argument('--epochs', type=int)
        train.add_argument('--batch-size', type=int)
        train.add_argument('--fanouts')
        train.add_argument('--hidden', type=int)
        train.add_argument('--lr', type=float)
        train.add_argument('--strategy', choices=['global-limit', 'per-hop-chained'])
        train.add_argument('--report', type=Path, help='metrics CSV path')
        train.add_argument('--model', type=Path, default=Path('model.npz'))
        if name == 'train-dist':
            train.add_argument('--workers', type=int)
            train.add_argument('--transport', choices=['in-process', 'socket'], default='in-process')
    evaluate = commands.add_parser('evaluate', help='held-out accuracy of a saved model')
    evaluate.add_argument('--store', type=Path)
    evaluate.add_argument('--model', type=Path, default=Path('model.npz'))
    serve = commands.add_parser('serve', help='serve sampling requests over TCP')
    serve.add_argument('--store', type=Path)
    serve.add_argument('--listen')
    bench = commands.add_parser('bench', help='run a benchmark sweep')
    bench.add_argument('scenario', choices=['mem', 'workers', 'readers', 'dist'])
    bench.add_argument('--store', type=Path)
    bench.add_argument('--out', type=Path, required=True)
    bench.add_argument('--cache-mib', default='4,256')
    bench.add_argument('--batch-sizes', default='512')
    bench.add_argument('--worker-counts', default='1,2,4')
    bench.add_argument('--max-batches', type=int)
    bench.add_argument('--seeds', type=Path, help="seed id file for 'readers' and 'dist'")
    bench.add_argument('--runs', type=int, default=100)
    stats = commands.add_parser('stats', help='store counts and graph metadata')
    stats.add_argument('--store', type=Path)
    for sub in commands.choices.values():
        sub.add_argument('--seed', type=int, dest='command_seed',
                         help='seed for this command (overrides the global --seed)')
    return parser
def _parse_id(text: str) -> Any:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text
def read_seed_file(path: Path) -> List[Any]:
    if not Path(path).is_file():
        raise FileNotFoundError(f"seed file not found: {path}")
    return [_parse_id(line) for line in Path(path).read_text(encoding='utf-8').splitlines() if line.strip()]
def read_query_arg(text: str) -> str:
    """Contents of the file named by `text`, stdin for '-', or `text` itself when it is inline query text"""
    if text == '-':
        return sys.stdin.read()
    try:
        if Path(text).is_file():
            return Path(text).read_text(encoding='utf-8')
    except OSError:
        # inline text can exceed the file name limit
        pass
    return text
def parse_params(items: List[str]) -> Dict[str, Any]:
    """NAME=JSON pairs; values that are not JSON are taken as strings"""
    params = {}
    for item in items:
        name, sep, raw = item.partition('=')
        if not sep or not name:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            params[name.lstrip('$')] = json.loads(raw)
        except json.JSONDecodeError:
            params[name.lstrip('$')] = raw
    return params
class Commands:
    """One method per subcommand; each returns an exit code"""
    def __init__(self, config: GlobalConfig, args):
        self.config = config
        self.args = args
        self.seed = config.get_seed()
    def store_path(self) -> Path:
        return Path(self.args.store) if getattr(self.args, 'store', None) else self.config.get_store_path()
    def open_store(self, mode: str = 'r') -> GraphStore:
        return GraphStore(self.store_path(), mode, self.config.get_page_cache_bytes(), self.config.use_write_lock())
    def train_config(self):
        from core.trainer import TrainConfig
        args = self.args
        return TrainConfig.from_config(
            self.config, epochs=getattr(args, 'epochs', None), batch_size=getattr(args, 'batch_size', None),
            fanouts=parse_int_list(args.fanouts) if getattr(args, 'fanouts', None) else None,
            hidden_dim=getattr(args, 'hidden', None), lr=getattr(args, 'lr', None),
            strategy=getattr(args, 'strategy', None), seed=self.seed)
    def ingest(self) -> int:
        from core.ingest import EdgeFile, IngestSpec, NodeFile, load_csv, parse_file_arg
        node_files, edge_files = [], []
        for item in self.args.nodes:
            path, parts = parse_file_arg(item)
            if len(parts) != 1:
                raise UsageError(f"--nodes expects PATH:LABEL, got {item!r}")
            node_files.append(NodeFile(Path(path), parts[0], self.args.id_column))
        for item in self.args.edges:
            path, parts = parse_file_arg(item)
            if len(parts) not in (1, 3):
                raise UsageError(f"--edges expects PATH:TYPE[:SRC_LABEL:DST_LABEL], got {item!r}")
            labels = parts[1:] if len(parts) == 3 else [None, None]
            edge_files.append(EdgeFile(Path(path), parts[0], src_label=labels[0], dst_label=labels[1]))
        spec = IngestSpec(node_files, edge_files, self.args.feature_dim, self.args.id_column)
        with self.open_store('w') as store:
            result = load_csv(spec, store, show_progress=sys.stderr.isatty())
        print(f"loaded {result['nodes_loaded']} nodes, {result['edges_loaded']} edges")
        return EXIT_OK
    def gen_sbm(self) -> int:
        from core.sbm_generator import SbmSpec, generate_sbm
        a = self.args
        spec = SbmSpec(a.communities, a.nodes_per_community, a.p_in, a.p_out, a.feature_dim, a.noise, self.seed)
        with self.open_store('w') as store:
            result = generate_sbm(spec, store, show_progress=sys.stderr.isatty())
        print(f"generated {result['nodes_loaded']} nodes, {result['edges_loaded']} edges")
        return EXIT_OK
    def query(self) -> int:
        text = read_query_arg(self.args.query)
        params = parse_params(self.args.param)
        with self.open_store() as store:
            engine = QueryEngine(store, self.seed)
            if self.args.explain:
                print(engine.explain(text, params))
                return EXIT_OK
            result = engine.run(text, params, profile_query=self.args.profile)
        if self.args.profile:
            from query import render_profile
            print(render_profile(result.profile))
            return EXIT_OK
        body = [[format_value(row[c]) for c in result.columns] for row in result.rows]
        if self.args.table:
            print(format_table(list(result.columns), body))
            print(f"{len(result)} row(s)")
            return EXIT_OK
        print('\t'.join(result.columns))
        for cells in body:
            print('\t'.join(cells))
        return EXIT_OK
    def sample_dist(self) -> int:
        from core.bench import bench_sample_distribution
        cfg = self.train_config().sampling()
        seeds = read_seed_file(self.args.seeds)
        with self.open_store() as store:
            frame, correlation = bench_sample_distribution(store, seeds, self.args.runs, cfg, self.args.max)
        self.args.out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(self.args.out, index=False)
        print(f"wrote {len(frame)} nodes to {self.args.out}; spearman {correlation:.4f}")
        return EXIT_OK
    def train(self) -> int:
        from core.sage_model import save_model
        from core.trainer import evaluate, train
        cfg = self.train_config()
        with self.open_store() as store:
            outcome = train(store, cfg, metrics_path=self.args.report, show_progress=sys.stderr.isatty())
            accuracy = evaluate(store, outcome['model'], outcome['held_out'], cfg)
        save_model(outcome['model'], self.args.model)
        for index, report in enumerate(outcome['epochs']):
            print(f"epoch {index}: loss {report['loss']:.4f}, {report['avg_batch_time'] * 1000:.1f} ms/batch, "
                  f"{report['sampled_nodes']:.1f} nodes, {report['sampled_edges']:.1f} edges")
        print(f"held-out accuracy {accuracy:.4f}; model saved to {self.args.model}")
        return EXIT_OK
    def evaluate(self) -> int:
        from core.sage_model import load_model
        from core.trainer import evaluate, list_node_ids, split_holdout
        if not Path(self.args.model).is_file():
            raise FileNotFoundError(f"model file not found: {self.args.model}")
        cfg = self.train_config()
        model = load_model(self.args.model)
        with self.open_store() as store:
            _, held_out = split_holdout(list_node_ids(store, cfg.node_type), cfg.holdout_fraction, cfg.seed)
            accuracy = evaluate(store, model, held_out, cfg)
        print(f"accuracy {accuracy:.4f} over {len(held_out)} held-out nodes")
        return EXIT_OK
    def train_dist(self) -> int:
        from core.distributed import ClusterConfig, run_distributed
        from core.sage_model import save_model
        from core.trainer import write_metrics
        cfg = self.train_config()
        workers = self.args.workers or self.config.get_worker_count()
        cluster = ClusterConfig(workers, cfg.batch_size, self.args.transport, self.config.get_sync_timeout(),
                                self.config.get_page_cache_bytes())
        with self.open_store() as store:
            outcome = run_distributed(store, cluster, cfg)
        save_model(outcome['model'], self.args.model)
        if self.args.report:
            write_metrics(outcome['records'], self.args.report)
        for index, seconds in enumerate(outcome['epoch_times']):
            print(f"epoch {index}: {seconds:.2f}s wall with {workers} worker(s)")
        return EXIT_OK
    def serve(self) -> int:
        from core.sampling_server import SamplingServer, parse_address
        host, port = parse_address(self.args.listen or self.config.get_listen_address())
        with self.open_store() as store:
            server = SamplingServer(store, host, port, self.config.get_worker_count())
            print(f"serving sampling requests on {host}:{port} (Ctrl+C to stop)")
            server.serve_forever()
        return EXIT_OK
    def bench(self) -> int:
        from core import bench
        cfg = self.train_config()
        scenario = self.args.scenario
        if scenario == 'mem':
            caches = [int(float(m) * 1024 * 1024) for m in self.args.cache_mib.split(',') if m.strip()]
            results = bench.bench_memory_sweep(self.store_path(), caches, parse_int_list(self.args.batch_sizes), cfg,
                                               self.args.max_batches)
            bench.write_results(results, self.args.out)
        elif scenario == 'workers':
            with self.open_store() as store:
                results = bench.bench_worker_sweep(store, parse_int_list(self.args.worker_counts), cfg,
                                                   sync_timeout=self.config.get_sync_timeout())
            bench.write_results(results, self.args.out)
        else:
            if self.args.seeds is None:
                raise UsageError(f"bench {scenario} needs --seeds")
            seeds = read_seed_file(self.args.seeds)
            if scenario == 'readers':
                results = bench.bench_reader_sweep(self.store_path(), parse_int_list(self.args.worker_counts),
                                                   cfg.sampling(), seeds,
                                                   cache_bytes=self.config.get_page_cache_bytes())
                bench.write_results(results, self.args.out)
            else:
                with self.open_store() as store:
                    frame, correlation = bench.bench_sample_distribution(store, seeds, self.args.runs,
                                                                         cfg.sampling())
                self.args.out.parent.mkdir(parents=True, exist_ok=True)
                frame.to_csv(self.args.out, index=False)
                print(f"spearman {correlation:.4f}")
        print(f"results written to {self.args.out}")
        return EXIT_OK
    def stats(self) -> int:
        from core.sampler import fetch_metadata
        node_type = str(self.config.get_option('Training', 'node_type', 'PAPER'))
        with self.open_store() as store:
            print(f"store {store.path}: {store.node_count} nodes, {store.edge_count} edges")
            meta = fetch_metadata(store, node_type)
        print(format_table(['Label', 'Keys', 'Feature Dim', 'Nodes'],
                           [[t.label, ', '.join(t.keys), str(t.feature_dim or '-'), str(t.count)]
                            for t in meta.node_types]))
        print(format_table(['Type', 'Source', 'Target', 'Keys', 'Edges'],
                           [[t.rel_type, str(t.source), str(t.target), ', '.join(t.keys), str(t.count)]
                            for t in meta.edge_types]))
        print(f"classes: {meta.num_classes}")
        return EXIT_OK
def _is_user_error(error: BaseException) -> bool:
    if isinstance(error, ExecutionError):
        return _is_user_error(error.cause)
    if isinstance(error, CorruptStore):
        return False
    return isinstance(error, (UsageError, StorageError, QueryError, GraphTrainingError, ValueError,
                              FileNotFoundError))
def _write_crash_log(log_dir: Path) -> Optional[Path]:
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        path = log_dir / f"crash_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        path.write_text(traceback.format_exc(), encoding='utf-8')
        return path
    except OSError:
        return None
def main(argv: Optional[List[str]] = None) -> int:
    colorama_init()
    parser = build_parser()
    try:
        args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        _fail(str(e).strip())
        return EXIT_USER
    if not args.command:
        print(parser.format_help(), file=sys.stderr)
        return EXIT_USER
    config = GlobalConfig(args.config)
    command_seed = getattr(args, 'command_seed', None)
    config.override('General', 'seed', args.seed if command_seed is None else command_seed)
    config.override('General', 'log_level', args.log_level)
    config.override('Storage', 'page_cache_mib', args.page_cache_mib)
    base_dir = Path(config.config_path).resolve().parent
    root = setup_logging(base_dir, config)
    log_dir = Path(root.log_file).parent if root is not None else base_dir / 'logs'
    handler = getattr(Commands(config, args), args.command.replace('-', '_'))
    try:
        return handler()
    except Exception as e:
        if _is_user_error(e):
            logger.error(f"{args.command} failed: {e}")
            _fail(str(e))
            return EXIT_USER
        logger.critical(f"Internal error in {args.command}: {e}", exc_info=True)
        crash_log = _write_crash_log(log_dir)
        _fail(f"internal error: {e}")
        if crash_log is not None:
            _warn(f"crash log written to {crash_log}")
        return EXIT_INTERNAL
    except KeyboardInterrupt:
        _warn("interrupted")
        return EXIT_USER
if __name__ == '__main__':
    sys.exit(main())
