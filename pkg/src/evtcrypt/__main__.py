# pyre-strict
from evtcrypt.cli import main

raise SystemExit(main())
