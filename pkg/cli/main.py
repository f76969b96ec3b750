"""
命令行入口

    python -m cli point --e 0.006951 [--xi 0.01]
    python -m cli sweep --xi 0.01 --out table3.csv --grid 0.006951,0.008341
    python -m cli validate all
    python -m cli export-sdp --eta 0.8 --level 2 --out sdp.json
    python -m cli classify --e 0.01 --samples 20

配置可以来自 --config 指定的 JSON 文件，命令行参数优先。
"""
import argparse
import json
import sys

from cli.commands import ALL_OUTPUTS, cmd_classify, cmd_export_sdp, cmd_point, load_noise
from cli.sweep import SweepSpec, cmd_sweep
from cli.validation import SUITES, cmd_validate
from config.config import Config
from npa.moments import normalize_level
from quantum.search import SearchConfig
from utils.errors import DomainError, InfeasibleViolationError, SdpConvergenceError
from utils.logger import Logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INFEASIBLE = 2

# 命令行参数名 -> 配置键
FLAG_SETTINGS = {
    "tol": "bisection_tol",
    "level": "npa_level",
    "restarts": "restarts",
    "seed": "seed",
}


def _outputs(text):
    values = tuple(v.strip() for v in text.split(",") if v.strip())
    unknown = set(values) - set(ALL_OUTPUTS)
    if unknown:
        raise argparse.ArgumentTypeError(f"未知输出 {sorted(unknown)}，可选 {ALL_OUTPUTS}")
    return values


def _grid(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"无法解析网格 {text!r}") from e


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 配置文件，命令行参数覆盖其中的值")
    common.add_argument("--tol", type=float, help="二分容差")
    common.add_argument("--level", help="NPA 层级：1、1+AB 或 2")
    common.add_argument("--restarts", type=int, help="局部搜索的随机起点数")
    common.add_argument("--seed", type=int, help="随机种子")
    common.add_argument("--out", help="输出文件路径")
    common.add_argument("--format", choices=("csv", "json"), dest="output_format", help="扫描输出格式，默认 csv")

    parser = argparse.ArgumentParser(prog="etacert", description="Eberhard/CHSH 违背的探测效率认证")
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", parents=[common], help="单点计算 η_qr、η_npa、η_ns")
    point.add_argument("--e", type=float, required=True, dest="e_obs")
    point.add_argument("--xi", type=float, default=0.0)
    point.add_argument("--outputs", type=_outputs, default=ALL_OUTPUTS)

    sweep = sub.add_parser("sweep", parents=[common], help="E_obs 网格扫描，输出 CSV/JSON")
    sweep.add_argument("--xi", type=float, default=0.0)
    sweep.add_argument("--e-min", type=float)
    sweep.add_argument("--e-max", type=float)
    sweep.add_argument("--points", type=int)
    sweep.add_argument("--grid", type=_grid, help="逗号分隔的 E_obs 列表")
    sweep.add_argument("--levels", help="逗号分隔的 NPA 层级，默认取配置中的 npa_level")
    sweep.add_argument("--outputs", type=_outputs, default=ALL_OUTPUTS)
    sweep.add_argument("--no-timing", action="store_true", help="wall_time 写 0，保证逐字节可复现")

    validate = sub.add_parser("validate", parents=[common], help="运行性质验证套件")
    validate.add_argument("suite", choices=SUITES + ("all",))

    export = sub.add_parser("export-sdp", parents=[common], help="导出 SDP 的 JSON 交换格式")
    export.add_argument("--eta", type=float, required=True)
    export.add_argument("--xi", type=float, default=0.0)

    classify = sub.add_parser("classify", parents=[common], help="八参数噪声点的可行性分类")
    classify.add_argument("--e", type=float, required=True, dest="e_obs")
    classify.add_argument("--noise", help="NoiseParams JSON 文件")
    classify.add_argument("--samples", type=int, default=10)
    return parser


def resolve_settings(args):
    settings = Config.load(args.config)
    for flag, key in FLAG_SETTINGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value
    settings["npa_level"] = normalize_level(settings["npa_level"])
    return settings


def _emit(payload, out=None):
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    if out:
        with open(out, "w", encoding="utf-8") as file:
            file.write(text + "\n")
    else:
        print(text)


def _run(args):
    settings = resolve_settings(args)
    if args.command == "point":
        bounds = cmd_point(args.e_obs, args.xi, settings, args.outputs)
        _emit([b.to_json() for b in bounds], args.out)
        return EXIT_OK
    if args.command == "sweep":
        spec = SweepSpec(
            e_min=args.e_min if args.e_min is not None else settings["sweep_e_min"],
            e_max=args.e_max if args.e_max is not None else settings["sweep_e_max"],
            points=args.points if args.points is not None else settings["sweep_points"],
            xi=args.xi,
            levels=tuple(normalize_level(v) for v in (args.levels or settings["npa_level"]).split(",")),
            tol=settings["bisection_tol"],
            outputs=frozenset(args.outputs),
            seed=settings["seed"],
            output_path=args.out,
            output_format=args.output_format or "csv",
            grid=args.grid,
            timing=not args.no_timing,
            search=SearchConfig.from_settings(settings),
        )
        _, text = cmd_sweep(spec)
        if not args.out:
            print(text, end="")
        return EXIT_OK
    if args.command == "validate":
        results = cmd_validate(args.suite, settings["seed"], settings)
        _emit([r.to_json() for r in results], args.out)
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED
    if args.command == "export-sdp":
        data = cmd_export_sdp(args.eta, args.xi, settings["npa_level"], args.out)
        if not args.out:
            _emit(data)
        return EXIT_OK
    if args.command == "classify":
        noise = load_noise(args.noise) if args.noise else None
        _emit(cmd_classify(args.e_obs, settings, noise, args.samples), args.out)
        return EXIT_OK
    return EXIT_FAILED


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except InfeasibleViolationError as e:
        print(f"错误：{e}（ξ={e.xi} 时可达到的最大违背为 {e.achievable:.6f}）", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, SdpConvergenceError, ValueError) as e:
        print(f"错误：{e}", file=sys.stderr)
        return EXIT_FAILED
