"""Domain ports (interfaces) that describe dependencies to be implemented by adapters."""
