from arbest.cli import main
import sys

sys.exit(main())
