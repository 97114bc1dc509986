# Integration tests: subprocess entry point and gated trend suites
