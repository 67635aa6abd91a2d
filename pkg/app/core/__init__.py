"""Core configuration, logging, error and type modules."""
