"""Main application entry point."""
import logging
import sys

from config import config

# Configure logging; stdout is reserved for results
logging.basicConfig(
    level=getattr(logging, config.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)

logger = logging.getLogger(__name__)


def main():
    """Main entry point."""
    from cli import run

    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
