DEFAULT_BUDGET = 40000
DEFAULT_SEED = 0
DEFAULT_RANDOM_PROBES = 20
RETRY_LIMIT = 200
RANDOM_ENTRY_BOUND = 3

# i1, i2, i3, i1+i2, i2+i3, i3+i1, i1+i2+i3 (мнимые части)
CANONICAL_PROBES = (
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (0, 1, 1),
    (1, 0, 1),
    (1, 1, 1),
)
