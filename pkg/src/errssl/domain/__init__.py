"""Domain layer: numerical core (pure, framework-agnostic)."""
