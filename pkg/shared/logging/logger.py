import logging
from logging.handlers import RotatingFileHandler
import os
import sys
from datetime import datetime

try:
    from pythonjsonlogger.json import JsonFormatter
except ImportError:  # python-json-logger < 3.1
    from pythonjsonlogger.jsonlogger import JsonFormatter

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def setup_logger(service_name):
    """Setup logger with daily rotation, size limit and a stderr echo"""
    logger = logging.getLogger(service_name)
    level_name = os.getenv("LOG_LEVEL", "INFO").upper()
    logger.setLevel(getattr(logging, level_name, logging.INFO))

    # Handlers are attached once per named logger
    if getattr(logger, "_mcsh_configured", False):
        return logger

    formatter = JsonFormatter(
        LOG_FORMAT,
        rename_fields={"asctime": "timestamp", "levelname": "level", "name": "service"},
    )

    log_dir = os.getenv("LOG_DIR", "logs")
    try:
        os.makedirs(log_dir, exist_ok=True)
        log_file = f"{log_dir}/{service_name}_{datetime.now().strftime('%Y-%m-%d')}.log"
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=1_000_000,  # 1MB
            backupCount=10
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    except OSError as e:
        print(f"log directory {log_dir} unavailable, logging to stderr only: {e}", file=sys.stderr)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(logging.WARNING)
    logger.addHandler(console_handler)

    logger.propagate = False
    logger._mcsh_configured = True
    return logger
