"""Exit codes shared by the solver runner and the bridge that launches it."""

EXIT_REJECTED = 3  # model features the solver cannot read (e.g. quadratic constraints)
EXIT_MISSING = 4  # solver library not installed
EXIT_ERROR = 5  # solver crashed or reported an internal error
