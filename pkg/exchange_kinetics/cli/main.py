import logging
import sys
from typing import Sequence

from exchange_kinetics.cli.config import parse_config
from exchange_kinetics.cli.runner import run_experiment
from exchange_kinetics.exceptions import ConfigError, ExchangeKineticsError

logger = logging.getLogger("exchange_kinetics")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def main(argv: Sequence[str] | None = None) -> int:
    """Exit codes: 0 on success, 1 on a runtime failure, 2 on a configuration error."""
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    except ConfigError as e:
        print(f"exchange-kinetics: error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(
        level=logging.DEBUG if cfg.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        run_experiment(cfg)
    except (ExchangeKineticsError, ValueError, RuntimeError, OSError) as e:
        logger.debug("run failed", exc_info=True)
        print(f"exchange-kinetics: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
