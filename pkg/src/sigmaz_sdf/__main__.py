"""Entry point for sigmaz_sdf module."""

from .cli.main import main

if __name__ == "__main__":
    main()
