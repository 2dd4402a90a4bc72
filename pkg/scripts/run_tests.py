import pytest
import sys
import os
import logging

logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")


def get_pytest_args():
    """Split our own flags from the pytest arguments.

    ``--slow`` enables the full-size benchmarks, everything else is passed
    to pytest unchanged.
    """
    args = sys.argv[1:]
    if "--slow" in args:
        args.remove("--slow")
        os.environ["GS_RUN_SLOW"] = "1"
    if not args:
        logging.warning("No arguments given. Running pytest on tests/ with coverage.")
        args = ["--cov=graphsearch", "--cov-report=term-missing", "tests"]
    return args


def main():
    """Run pytest and exit with its status code."""
    pytest_args = get_pytest_args()

    logging.info(f"Running tests with arguments: {pytest_args}")

    result = pytest.main(pytest_args)

    if result != 0:
        logging.error(f"Tests failed with exit code: {int(result)}")
        sys.exit(int(result))
    else:
        logging.info("All tests passed successfully.")


if __name__ == "__main__":
    main()
