import sys

from polyploid.bench_cli import main

sys.exit(main())
