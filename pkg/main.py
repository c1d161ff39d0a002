import argparse
import logging
import sys
from typing import List, Optional

import pandas as pd

from src.config import FORMATS, MODELS, SUITES, build_config, load_config
from src.exceptions import ConfigError
from src.harness import REPORT_COLUMNS, exit_code, report, run

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    """Разбор аргументов командной строки semiclass-lab verify|report"""
    parser = argparse.ArgumentParser(prog="semiclass-lab", description="Проверка асимптотик Бергмана и Тёплица")
    parser.add_argument("--verbose", action="store_true", help="журнал уровня DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="выполнить проверки и записать manifest.json")
    verify.add_argument("--config", help="JSON файл конфигурации")
    verify.add_argument("--suite", choices=SUITES)
    verify.add_argument("--checks", help="имена проверок через запятую")
    verify.add_argument("--model", choices=MODELS)
    verify.add_argument("--p", dest="p_range", help="диапазон уровней MIN:MAX")
    verify.add_argument("--out", dest="output_dir", help="каталог отчётов")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--format", choices=FORMATS)

    show = commands.add_parser("report", help="таблица записей манифеста")
    show.add_argument("manifest", help="путь к manifest.json")
    show.add_argument("--format", choices=FORMATS, default="csv")
    return parser


def verify(args: argparse.Namespace) -> int:
    """Запуск проверок, печать сводной таблицы"""
    overrides = {
        "suite": args.suite,
        "checks": args.checks,
        "model": args.model,
        "pRange": args.p_range,
        "outputDir": args.output_dir,
        "seed": args.seed,
        "format": args.format,
    }
    config = build_config(load_config(args.config), overrides)
    manifest = run(config)
    frame = pd.DataFrame(manifest["records"], columns=[*REPORT_COLUMNS, "residue"])
    print(frame.to_string(index=False))
    return exit_code(manifest)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа semiclass-lab
    :return: 0 все проверки прошли, 1 есть fail, 2 ошибка использования или конфигурации
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc_info:
        return 0 if exc_info.code == 0 else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    try:
        if args.command == "verify":
            return verify(args)
        print(report(args.manifest, args.format), end="")
        return 0
    except ConfigError as exc_info:
        logger.error(exc_info.message)
        print(f"Ошибка: {exc_info.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
