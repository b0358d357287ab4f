from fracseries.cli import main
import sys
sys.exit(main())
