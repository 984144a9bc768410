"""批处理入口

退出码：0 通过，1 数学性质不成立，2 解析错误，3 资源保护，4 缺少 κ。
报告写到 stdout 或 --out，日志写到 stderr。
"""

import argparse
import sys
from typing import Optional, Sequence

from app.bounds.report import VIOLATED, csv_document
from app.manager.study_manager import study_manager
from app.mc.estimates import summary_csv
from app.utils.errors import DeJongError, SpecError
from app.utils.logger import logger
from app.utils.serialize import dumps, write_output

EXIT_OK = 0
EXIT_VIOLATION = 1


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="输出文件，缺省写 stdout")


def _add_mc(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mc", type=int, help="蒙特卡洛样本数 m")
    parser.add_argument("--seed", type=int, help="64 位种子，缺省取设置 mc.seed")
    parser.add_argument("--delta", type=float, help="DKW 置信参数 δ")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dejong", description="退化 U 统计量的四阶矩定理：精确核查与界的计算")
    commands = parser.add_subparsers(dest="command", required=True)

    decompose = commands.add_parser("decompose", help="Hoeffding 分解")
    decompose.add_argument("spec")
    _add_common(decompose)

    verify = commands.add_parser("verify", help="可交换对的恒等式与引理核查")
    verify.add_argument("spec")
    verify.add_argument("--kappa", help="κ_p（有理数字符串）")
    verify.add_argument("--chain", action="store_true", help="同时核查 Berry–Esseen 证明链")
    _add_common(verify)

    bound = commands.add_parser("bound", help="Kolmogorov / Wasserstein 界与实际距离")
    bound.add_argument("spec", nargs="?")
    bound.add_argument("--kappa")
    bound.add_argument("--inputs-only", action="store_true", help="不读规格，直接用 --e4 --rho --p --n 计算")
    bound.add_argument("--e4")
    bound.add_argument("--rho")
    bound.add_argument("--p", type=int)
    bound.add_argument("--n", type=int)
    bound.add_argument("--symmetric", action="store_true")
    bound.add_argument("--format", choices=("json", "csv"), default="json")
    _add_mc(bound)
    _add_common(bound)

    distance = commands.add_parser("distance", help="到 N(0,1) 的 Kolmogorov / Wasserstein 距离")
    distance.add_argument("spec")
    _add_mc(distance)
    _add_common(distance)

    simulate = commands.add_parser("simulate", help="蒙特卡洛样本摘要")
    simulate.add_argument("spec")
    simulate.add_argument("--workers", type=int)
    simulate.add_argument("--format", choices=("json", "csv"), default="json")
    _add_mc(simulate)
    _add_common(simulate)

    sweep = commands.add_parser("sweep", help="按族文件批量计算界与距离")
    sweep.add_argument("family")
    sweep.add_argument("--format", choices=("json", "csv"), default="csv")
    _add_common(sweep)

    serve = commands.add_parser("serve", help="启动 HTTP 服务")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_decompose(args) -> int:
    spec = study_manager.load(args.spec)
    write_output(dumps(study_manager.decompose(spec)), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    spec = study_manager.load(args.spec)
    doc, passed = study_manager.verify(spec, args.kappa, args.chain)
    write_output(dumps(doc), args.out)
    return EXIT_OK if passed else EXIT_VIOLATION


def _cmd_bound(args) -> int:
    if args.inputs_only:
        missing = [name for name in ("e4", "rho", "p", "n") if getattr(args, name) is None]
        if missing:
            raise SpecError(f"--inputs-only 需要 {', '.join('--' + m for m in missing)}")
        report = study_manager.bound_from_inputs(args.e4, args.rho, args.kappa, args.p, args.n, args.symmetric)
    else:
        if args.spec is None:
            raise SpecError("bound 需要规格文件或 --inputs-only")
        spec = study_manager.load(args.spec)
        report = study_manager.bound(spec, args.kappa, args.mc, args.seed, args.delta)
    text = csv_document([report]) if args.format == "csv" else dumps(report.to_dict())
    write_output(text, args.out)
    return EXIT_VIOLATION if report.verdict == VIOLATED else EXIT_OK


def _cmd_distance(args) -> int:
    spec = study_manager.load(args.spec)
    result = study_manager.distances(spec, args.mc, args.seed, args.delta)
    if result is None:
        raise SpecError(f"{spec.label()} 无法精确计算距离，请用 --mc 指定样本数")
    write_output(dumps(result.to_dict()), args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec = study_manager.load(args.spec)
    summary = study_manager.simulate(spec, args.mc, args.seed, args.delta, args.workers)
    text = summary_csv([summary]) if args.format == "csv" else dumps(summary.to_dict())
    write_output(text, args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    result = study_manager.sweep(args.family)
    if args.format == "csv":
        text = result.to_csv()
    else:
        text = dumps(
            {
                "reports": [r.to_dict() for r in result.reports],
                "failures": [vars(f) for f in result.failures],
            }
        )
    write_output(text, args.out)
    return EXIT_VIOLATION if any(r.verdict == VIOLATED for r in result.reports) else EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "bound": _cmd_bound,
    "distance": _cmd_distance,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "serve": _cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.info(f"开始执行 {args.command}")
    try:
        code = COMMANDS[args.command](args)
    except DeJongError as e:
        logger.error(f"{args.command} 失败 ({type(e).__name__}): {e}")
        return e.exit_code
    logger.info(f"{args.command} 结束，退出码 {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
