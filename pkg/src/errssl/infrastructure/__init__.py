"""Infrastructure layer: adapters for files and generators."""
