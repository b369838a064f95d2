# main.py
import sys

from dotenv import load_dotenv

load_dotenv()  # Load .env before other imports

from simulation.cli_io.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
