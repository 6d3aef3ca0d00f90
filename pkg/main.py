import sys

from qla2d.cli.main import main

if __name__ == '__main__':
    sys.exit(main())
