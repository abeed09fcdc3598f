"""Built-in run configurations."""
