"""Scale calculus at finite h and nondifferentiable variational problems with free terminal point."""

__version__ = "1.0.0"
