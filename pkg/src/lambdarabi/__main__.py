import sys

from lambdarabi.cli import main

sys.exit(main())
