"""Allow ``python -m rwre`` as an alias for the ``rwre`` console script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
